//! Symbolic classes in H²(M; Z)/torsion over a named generator basis.
//!
//! Generators live in blocks. Generators in distinct blocks pair to zero,
//! which is how the cohomology of a connected sum splits. Within a block a
//! pairing has to be declared before a square involving both generators can
//! be evaluated.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use num_integer::Integer;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClassError {
    #[error("classes live over different generator bases")]
    BasisMismatch,
    #[error("pairing between `{0}` and `{1}` is not declared")]
    UnknownPairing(String, String),
    #[error("generator name `{0}` is already in the basis")]
    DuplicateGenerator(String),
    #[error("generator `{0}` must have positive divisibility")]
    ZeroDivisibility(String),
    #[error("generators `{0}` and `{1}` are in different blocks and pair to zero")]
    CrossBlockPairing(String, String),
    #[error("refusing to declare a pairing between opaque generators `{0}` and `{1}`")]
    OpaquePairing(String, String),
    #[error("no generator named `{0}`")]
    UnknownGenerator(String),
    #[error("cannot parse class `{text}` at byte {offset}: {message}")]
    Syntax {
        text: String,
        offset: usize,
        message: String,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Generator {
    pub name: String,
    pub block: usize,
    pub square: i64,
    /// Certified divisor of the generator in the lattice (1 when nothing
    /// better is known).
    pub divisibility: u64,
    /// Opaque generators (first Chern classes of catalog pieces) only know
    /// their own square.
    pub opaque: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GeneratorBasis {
    generators: Vec<Generator>,
    pairings: BTreeMap<(usize, usize), i64>,
    next_block: usize,
}

impl GeneratorBasis {
    pub fn new() -> Self {
        Self::default()
    }

    /// Reserve a fresh block id.
    pub fn new_block(&mut self) -> usize {
        self.next_block += 1;
        self.next_block - 1
    }

    pub fn push(
        &mut self,
        name: impl Into<String>,
        block: usize,
        square: i64,
        divisibility: u64,
        opaque: bool,
    ) -> Result<usize, ClassError> {
        let name = name.into();
        if self.index_of(&name).is_some() {
            return Err(ClassError::DuplicateGenerator(name));
        }
        if divisibility == 0 {
            return Err(ClassError::ZeroDivisibility(name));
        }
        self.next_block = self.next_block.max(block + 1);
        self.generators.push(Generator {
            name,
            block,
            square,
            divisibility,
            opaque,
        });
        Ok(self.generators.len() - 1)
    }

    /// Adds a generator in a block of its own.
    pub fn push_isolated(
        &mut self,
        name: impl Into<String>,
        square: i64,
        divisibility: u64,
        opaque: bool,
    ) -> Result<usize, ClassError> {
        let block = self.new_block();
        self.push(name, block, square, divisibility, opaque)
    }

    pub fn declare_pairing(&mut self, a: usize, b: usize, value: i64) -> Result<(), ClassError> {
        let (ga, gb) = (&self.generators[a], &self.generators[b]);
        if a == b {
            self.generators[a].square = value;
            return Ok(());
        }
        if ga.block != gb.block {
            return Err(ClassError::CrossBlockPairing(
                ga.name.clone(),
                gb.name.clone(),
            ));
        }
        if ga.opaque && gb.opaque {
            return Err(ClassError::OpaquePairing(ga.name.clone(), gb.name.clone()));
        }
        self.pairings.insert((a.min(b), a.max(b)), value);
        Ok(())
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.generators.iter().position(|g| g.name == name)
    }

    pub fn pairing(&self, a: usize, b: usize) -> Result<i64, ClassError> {
        if a == b {
            return Ok(self.generators[a].square);
        }
        let (ga, gb) = (&self.generators[a], &self.generators[b]);
        if ga.block != gb.block {
            return Ok(0);
        }
        self.pairings
            .get(&(a.min(b), a.max(b)))
            .copied()
            .ok_or_else(|| ClassError::UnknownPairing(ga.name.clone(), gb.name.clone()))
    }
}

/// An integral class, as a sparse combination of basis generators.
///
/// Equality, ordering and hashing look at the coefficients only; keep
/// classes from different bases out of the same collection.
#[derive(Clone)]
pub struct CohClass {
    basis: Arc<GeneratorBasis>,
    coeffs: BTreeMap<usize, i64>,
}

impl CohClass {
    pub fn zero(basis: &Arc<GeneratorBasis>) -> Self {
        Self {
            basis: Arc::clone(basis),
            coeffs: BTreeMap::new(),
        }
    }

    pub fn generator(basis: &Arc<GeneratorBasis>, index: usize) -> Self {
        Self::from_terms(basis, [(index, 1)])
    }

    pub fn from_terms(
        basis: &Arc<GeneratorBasis>,
        terms: impl IntoIterator<Item = (usize, i64)>,
    ) -> Self {
        let mut coeffs = BTreeMap::new();
        for (index, c) in terms {
            assert!(index < basis.len(), "generator index {index} out of range");
            *coeffs.entry(index).or_insert(0) += c;
        }
        coeffs.retain(|_, c| *c != 0);
        Self {
            basis: Arc::clone(basis),
            coeffs,
        }
    }

    pub fn basis(&self) -> &Arc<GeneratorBasis> {
        &self.basis
    }

    /// Nonzero coefficients keyed by generator index.
    pub fn coeffs(&self) -> &BTreeMap<usize, i64> {
        &self.coeffs
    }

    pub fn coeff(&self, index: usize) -> i64 {
        self.coeffs.get(&index).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    fn same_basis(&self, other: &CohClass) -> Result<(), ClassError> {
        if Arc::ptr_eq(&self.basis, &other.basis) || *self.basis == *other.basis {
            Ok(())
        } else {
            Err(ClassError::BasisMismatch)
        }
    }

    pub fn add(&self, other: &CohClass) -> Result<CohClass, ClassError> {
        self.same_basis(other)?;
        Ok(Self::from_terms(
            &self.basis,
            self.coeffs
                .iter()
                .chain(other.coeffs.iter())
                .map(|(&i, &c)| (i, c)),
        ))
    }

    pub fn sub(&self, other: &CohClass) -> Result<CohClass, ClassError> {
        self.add(&other.negate())
    }

    pub fn negate(&self) -> CohClass {
        self.scale(-1)
    }

    pub fn scale(&self, n: i64) -> CohClass {
        Self::from_terms(&self.basis, self.coeffs.iter().map(|(&i, &c)| (i, n * c)))
    }

    /// Self-intersection number.
    pub fn square(&self) -> Result<i64, ClassError> {
        let support: Vec<(usize, i64)> = self.coeffs.iter().map(|(&i, &c)| (i, c)).collect();
        let mut total = 0;
        for (pos, &(i, ci)) in support.iter().enumerate() {
            total += ci * ci * self.basis.pairing(i, i)?;
            for &(j, cj) in &support[pos + 1..] {
                total += 2 * ci * cj * self.basis.pairing(i, j)?;
            }
        }
        Ok(total)
    }

    /// Largest `D` with every weighted coefficient `c_i · div(g_i)`
    /// divisible by `D`; 0 for the zero class. A lower bound for the true
    /// divisibility when generator divisibilities are conservative.
    pub fn divisibility(&self) -> u64 {
        self.coeffs.iter().fold(0u64, |acc, (&i, &c)| {
            acc.gcd(&(c.unsigned_abs() * self.basis.generators[i].divisibility))
        })
    }

    /// Parses the printed syntax, e.g. `c1(X_2) - 4*f(Y_2) + E1 - E2`.
    /// The `*` between a coefficient and a name is optional.
    pub fn parse(basis: &Arc<GeneratorBasis>, text: &str) -> Result<CohClass, ClassError> {
        let err = |offset: usize, message: &str| ClassError::Syntax {
            text: text.to_string(),
            offset,
            message: message.to_string(),
        };
        if let Some(pos) = text.bytes().position(|b| !b.is_ascii()) {
            return Err(err(pos, "non-ASCII character"));
        }
        let chars: Vec<(usize, char)> = text
            .char_indices()
            .filter(|(_, c)| !c.is_whitespace())
            .collect();
        let compact: String = chars.iter().map(|&(_, c)| c).collect();
        let offset_at = |i: usize| chars.get(i).map_or(text.len(), |&(o, _)| o);
        if compact == "0" {
            return Ok(Self::zero(basis));
        }
        if compact.is_empty() {
            return Err(err(0, "empty class"));
        }
        let mut names: Vec<(usize, &str)> = basis
            .generators
            .iter()
            .enumerate()
            .map(|(i, g)| (i, g.name.as_str()))
            .collect();
        // longest match first so `E12` is not read as `E1` followed by `2`
        names.sort_by_key(|(_, n)| std::cmp::Reverse(n.len()));

        let mut terms = Vec::new();
        let mut i = 0;
        let mut first = true;
        while i < chars.len() {
            let sign = match chars[i].1 {
                '+' => {
                    i += 1;
                    1
                }
                '-' => {
                    i += 1;
                    -1
                }
                _ if first => 1,
                _ => return Err(err(offset_at(i), "expected `+` or `-`")),
            };
            first = false;
            let digits_start = i;
            while i < chars.len() && chars[i].1.is_ascii_digit() {
                i += 1;
            }
            let coeff: i64 = if i == digits_start {
                1
            } else {
                compact[digits_start..i]
                    .parse()
                    .map_err(|_| err(offset_at(digits_start), "coefficient out of range"))?
            };
            if i > digits_start && i < chars.len() && chars[i].1 == '*' {
                i += 1;
            }
            let rest = &compact[i..];
            let Some(&(index, name)) = names.iter().find(|(_, n)| rest.starts_with(n)) else {
                return Err(err(offset_at(i), "expected a generator name"));
            };
            terms.push((index, sign * coeff));
            i += name.len();
        }
        Ok(Self::from_terms(basis, terms))
    }
}

impl PartialEq for CohClass {
    fn eq(&self, other: &Self) -> bool {
        self.coeffs == other.coeffs
    }
}

impl Eq for CohClass {}

impl PartialOrd for CohClass {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for CohClass {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.coeffs.cmp(&other.coeffs)
    }
}

impl std::hash::Hash for CohClass {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.coeffs.hash(state);
    }
}

impl fmt::Debug for CohClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CohClass({self})")
    }
}

impl fmt::Display for CohClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (pos, (&i, &c)) in self.coeffs.iter().enumerate() {
            let name = &self.basis.generators[i].name;
            let sign = if c < 0 { "-" } else { "+" };
            if pos == 0 {
                if c < 0 {
                    f.write_str("-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            match c.unsigned_abs() {
                1 => f.write_str(name)?,
                a => write!(f, "{a}*{name}")?,
            }
        }
        Ok(())
    }
}

/// Index lookup by name, shared by callers that build classes by hand.
pub fn name_index(basis: &GeneratorBasis) -> HashMap<&str, usize> {
    basis
        .generators
        .iter()
        .enumerate()
        .map(|(i, g)| (g.name.as_str(), i))
        .collect()
}
