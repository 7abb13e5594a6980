//! Finite-dimensional one-sided modules over a Hopf algebra, given as one
//! action matrix per algebra basis vector. Tensor, dual, twisted and trivial
//! constructions, exact Hom-space solving, and the projectivity / freeness
//! certificates built on split epimorphisms from free covers.

use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::Scalar;
use crate::hopf::{antipode_power, HopfData};
use crate::matrix::{random_int_scalar, solve_affine, Matrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn flip(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }
}

pub type HopfRef = Arc<HopfData>;

/// A module given by its action matrices: for a left module `action[i]` is
/// the operator `v -> e_i . v`; for a right module it is `v -> v . e_i`.
#[derive(Debug, Clone)]
pub struct Rep {
    pub hopf: HopfRef,
    pub side: Side,
    pub dim: usize,
    pub action: Vec<Matrix>,
}

pub fn same_hopf(a: &HopfRef, b: &HopfRef) -> bool {
    Arc::ptr_eq(a, b) || a.structure_eq(b)
}

impl Rep {
    pub fn new(hopf: HopfRef, side: Side, dim: usize, action: Vec<Matrix>) -> Result<Rep> {
        if action.len() != hopf.dim || action.iter().any(|m| m.rows() != dim || m.cols() != dim) {
            return Err(Error::ShapeMismatch(
                "one square action matrix per algebra basis vector is required".into(),
            ));
        }
        let rep = Rep {
            hopf,
            side,
            dim,
            action,
        };
        rep.check_module_law()?;
        Ok(rep)
    }

    /// The regular module: A acting on itself by multiplication.
    pub fn regular(hopf: &HopfRef, side: Side) -> Rep {
        let action = (0..hopf.dim)
            .map(|i| match side {
                Side::Left => hopf.left_mult_matrix(i),
                Side::Right => hopf.right_mult_matrix(i),
            })
            .collect();
        Rep {
            hopf: hopf.clone(),
            side,
            dim: hopf.dim,
            action,
        }
    }

    /// The trivial module of dimension n: a acts as eps(a) id.
    pub fn trivial(hopf: &HopfRef, n: usize, side: Side) -> Rep {
        let action = (0..hopf.dim)
            .map(|i| Matrix::identity(hopf.field.clone(), n).scale(&hopf.counit[i]))
            .collect();
        Rep {
            hopf: hopf.clone(),
            side,
            dim: n,
            action,
        }
    }

    /// Checks the module law on all basis pairs plus the unit law.
    pub fn check_module_law(&self) -> Result<()> {
        let h = &self.hopf;
        let unit_action = self.act(&h.unit);
        if !unit_action.is_identity() {
            return Err(Error::ShapeMismatch("unit does not act as identity".into()));
        }
        for i in 0..h.dim {
            for j in 0..h.dim {
                let composite = match self.side {
                    Side::Left => self.action[i].mul(&self.action[j]),
                    Side::Right => self.action[j].mul(&self.action[i]),
                };
                let expected = self.act(&h.mult[i][j]);
                if composite != expected {
                    return Err(Error::ShapeMismatch(format!(
                        "action violates the module law at basis pair ({i},{j})"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Action of an arbitrary algebra element given by coordinates.
    pub fn act(&self, a: &[Scalar]) -> Matrix {
        let mut out = Matrix::zero(self.hopf.field.clone(), self.dim, self.dim);
        for (k, c) in a.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            out = out.add(&self.action[k].scale(c));
        }
        out
    }

    /// Tensor product of two modules on the same side; the algebra acts
    /// through the comultiplication.
    pub fn tensor(&self, other: &Rep) -> Result<Rep> {
        if self.side != other.side || !same_hopf(&self.hopf, &other.hopf) {
            return Err(Error::MixedSides);
        }
        let h = &self.hopf;
        let dim = self.dim * other.dim;
        let mut action = Vec::with_capacity(h.dim);
        for k in 0..h.dim {
            let mut m = Matrix::zero(h.field.clone(), dim, dim);
            for i in 0..h.dim {
                for j in 0..h.dim {
                    let c = &h.comult[k][i][j];
                    if c.is_zero() {
                        continue;
                    }
                    m = m.add(&self.action[i].kronecker(&other.action[j]).scale(c));
                }
            }
            action.push(m);
        }
        Ok(Rep {
            hopf: self.hopf.clone(),
            side: self.side,
            dim,
            action,
        })
    }

    /// Dual module on the opposite side: <xi.a, v> = <xi, a.v> and dually.
    pub fn dual(&self) -> Rep {
        Rep {
            hopf: self.hopf.clone(),
            side: self.side.flip(),
            dim: self.dim,
            action: self.action.iter().map(Matrix::transpose).collect(),
        }
    }

    /// Dual module pulled back through the antipode to the original side.
    pub fn dual_same_side(&self) -> Result<Rep> {
        self.dual().twist(1)
    }

    /// Twist by the n-th antipode power; the side flips for odd n.
    pub fn twist(&self, n: i64) -> Result<Rep> {
        if n == 0 {
            return Ok(self.clone());
        }
        let sn = antipode_power(&self.hopf, n)?;
        let d = self.hopf.dim;
        let action = (0..d)
            .map(|i| self.act(&sn.col(i)))
            .collect();
        let side = if n.rem_euclid(2) == 1 {
            self.side.flip()
        } else {
            self.side
        };
        Ok(Rep {
            hopf: self.hopf.clone(),
            side,
            dim: self.dim,
            action,
        })
    }

    pub fn direct_sum(&self, other: &Rep) -> Result<Rep> {
        if self.side != other.side || !same_hopf(&self.hopf, &other.hopf) {
            return Err(Error::MixedSides);
        }
        let action = self
            .action
            .iter()
            .zip(&other.action)
            .map(|(a, b)| a.direct_sum(b))
            .collect();
        Ok(Rep {
            hopf: self.hopf.clone(),
            side: self.side,
            dim: self.dim + other.dim,
            action,
        })
    }

    /// n-fold direct sum of copies of this module.
    pub fn power(&self, n: usize) -> Rep {
        let mut out = self.clone();
        if n == 0 {
            return Rep {
                hopf: self.hopf.clone(),
                side: self.side,
                dim: 0,
                action: vec![Matrix::zero(self.hopf.field.clone(), 0, 0); self.hopf.dim],
            };
        }
        for _ in 1..n {
            out = out.direct_sum(self).expect("same module");
        }
        out
    }
}

/// Spec'd operation names, thin wrappers over the `Rep` methods.
pub fn tensor_modules(m1: &Rep, m2: &Rep) -> Result<Rep> {
    m1.tensor(m2)
}

pub fn dual_module(m: &Rep) -> Rep {
    m.dual()
}

pub fn twist_module(m: &Rep, n: i64) -> Result<Rep> {
    m.twist(n)
}

pub fn trivial_module(hopf: &HopfRef, n: usize) -> Rep {
    Rep::trivial(hopf, n, Side::Left)
}

/// Exact basis of Hom_A(m1, m2): all matrices H with H a(v) = a H(v)
/// (respectively H(v a) = H(v) a). Checking on algebra generators suffices
/// because the intertwiner condition is multiplicative and linear.
pub fn hom_space(m1: &Rep, m2: &Rep) -> Result<Vec<Matrix>> {
    if m1.side != m2.side || !same_hopf(&m1.hopf, &m2.hopf) {
        return Err(Error::MixedSides);
    }
    let field = m1.hopf.field.clone();
    let (d1, d2) = (m1.dim, m2.dim);
    let unknowns = d1 * d2;
    if unknowns == 0 {
        return Ok(vec![]);
    }
    let gens = &m1.hopf.gens;
    let mut rows: Vec<Vec<Scalar>> = Vec::with_capacity(gens.len() * unknowns);
    for &g in gens {
        // rho2(g) H - H rho1(g) = 0, vectorized row-major over H's entries.
        let a = &m2.action[g];
        let b = &m1.action[g];
        for i in 0..d2 {
            for j in 0..d1 {
                let mut row = vec![field.zero(); unknowns];
                for k in 0..d2 {
                    let v = a.get(i, k);
                    if !v.is_zero() {
                        row[k * d1 + j] = row[k * d1 + j].add(v);
                    }
                }
                for l in 0..d1 {
                    let v = b.get(l, j);
                    if !v.is_zero() {
                        row[i * d1 + l] = row[i * d1 + l].sub(v);
                    }
                }
                rows.push(row);
            }
        }
    }
    let mat = Matrix::from_rows(field.clone(), rows);
    let basis = mat.kernel_basis();
    Ok(basis
        .into_iter()
        .map(|v| Matrix::from_vec(field.clone(), d2, d1, v))
        .collect())
}

/// A random integer-coefficient combination of a Hom-space basis.
pub fn random_hom(m1: &Rep, m2: &Rep, seed: u64, bound: i64) -> Result<Matrix> {
    let basis = hom_space(m1, m2)?;
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    Ok(random_combination(
        &basis,
        m2.dim,
        m1.dim,
        bound,
        &mut rng,
        &m1.hopf,
    ))
}

pub(crate) fn random_combination<R: rand::Rng>(
    basis: &[Matrix],
    rows: usize,
    cols: usize,
    bound: i64,
    rng: &mut R,
    hopf: &HopfData,
) -> Matrix {
    let mut out = Matrix::zero(hopf.field.clone(), rows, cols);
    for b in basis {
        let c = random_int_scalar(&hopf.field, bound, rng);
        if !c.is_zero() {
            out = out.add(&b.scale(&c));
        }
    }
    out
}

#[derive(Debug, Clone)]
pub enum IsoResult {
    /// An exactly verified invertible intertwiner.
    Iso(Matrix),
    /// A certified disproof: dimension or Hom-space invariant mismatch.
    Disproved(String),
    /// Random search failed; isomorphy is undecided.
    Inconclusive,
}

/// Tries to certify an isomorphism by seeded random search. Absence of an
/// isomorphism is only ever reported through an invariant mismatch, never
/// from failed sampling.
pub fn is_isomorphic(m1: &Rep, m2: &Rep, seed: u64, retries: usize) -> Result<IsoResult> {
    if m1.side != m2.side || !same_hopf(&m1.hopf, &m2.hopf) {
        return Err(Error::MixedSides);
    }
    if m1.dim != m2.dim {
        return Ok(IsoResult::Disproved(format!(
            "dimension mismatch: {} vs {}",
            m1.dim, m2.dim
        )));
    }
    let triv = Rep::trivial(&m1.hopf, 1, m1.side);
    let probes: [(&str, &Rep, &Rep, &Rep, &Rep); 2] = [
        ("Hom(-, triv)", m1, &triv, m2, &triv),
        ("Hom(triv, -)", &triv, m1, &triv, m2),
    ];
    for (name, a1, b1, a2, b2) in probes {
        let d1 = hom_space(a1, b1)?.len();
        let d2 = hom_space(a2, b2)?.len();
        if d1 != d2 {
            return Ok(IsoResult::Disproved(format!(
                "invariant mismatch: dim {name} is {d1} vs {d2}"
            )));
        }
    }
    let basis = hom_space(m1, m2)?;
    let end_dim = hom_space(m1, m1)?.len();
    if basis.len() != end_dim {
        return Ok(IsoResult::Disproved(format!(
            "invariant mismatch: dim Hom(m1,m2) = {} but dim End(m1) = {}",
            basis.len(),
            end_dim
        )));
    }
    if basis.is_empty() {
        return Ok(IsoResult::Disproved(
            "no nonzero homomorphisms between nonzero modules".into(),
        ));
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    for bound in [1i64, 2, 3] {
        for _ in 0..retries.max(1) {
            let cand = random_combination(&basis, m2.dim, m1.dim, bound, &mut rng, &m1.hopf);
            if cand.is_invertible() {
                return Ok(IsoResult::Iso(cand));
            }
        }
    }
    Ok(IsoResult::Inconclusive)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Projectivity {
    Projective,
    NotProjective,
}

/// Outcome of the split-epimorphism feasibility test against a free cover.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProjectivityCertificate {
    pub verdict: Projectivity,
    /// Number of free generators of the cover (one per basis vector).
    pub generators: usize,
    /// Splitting homomorphism m -> A^g (rows are slot-major A-coordinates),
    /// satisfying pi . h = id exactly; present iff projective.
    pub splitting: Option<Matrix>,
    pub rank_coeffs: Option<usize>,
    pub rank_augmented: Option<usize>,
}

/// Decides projectivity by testing whether the canonical surjection from the
/// free cover A^g (g = dim m, one generator per basis vector) splits; the
/// splitting is searched for inside Hom_A(m, A^g) as an affine system.
pub fn is_projective(m: &Rep) -> Result<ProjectivityCertificate> {
    let h = &m.hopf;
    let field = h.field.clone();
    let g = m.dim;
    let d = m.dim;
    let regular = Rep::regular(h, m.side);
    let slot_basis = hom_space(m, &regular)?;
    let t = slot_basis.len();

    // Column (s, beta): the matrix v_j -> (B_beta v_j) . v_s, vectorized
    // row-major. pi . h = id becomes a linear system over the coefficients.
    let unknowns = g * t;
    let mut cols: Vec<Vec<Scalar>> = Vec::with_capacity(unknowns);
    for s in 0..g {
        for beta in 0..t {
            let mut psi = Matrix::zero(field.clone(), d, d);
            for j in 0..d {
                let a_elt = slot_basis[beta].col(j);
                let acted = m.act(&a_elt).col(s);
                for i in 0..d {
                    psi.set(i, j, acted[i].clone());
                }
            }
            cols.push(psi.entries().to_vec());
        }
    }
    let mut system = Matrix::zero(field.clone(), d * d, unknowns);
    for (c, col) in cols.iter().enumerate() {
        for (r, v) in col.iter().enumerate() {
            if !v.is_zero() {
                system.set(r, c, v.clone());
            }
        }
    }
    let rhs: Vec<Scalar> = Matrix::identity(field.clone(), d).entries().to_vec();
    match solve_affine(&system, &rhs) {
        Ok(sol) => {
            // Assemble h: m -> A^g and verify the split-epi equation exactly.
            let da = h.dim;
            let mut split = Matrix::zero(field.clone(), g * da, d);
            for s in 0..g {
                for beta in 0..t {
                    let c = &sol.particular[s * t + beta];
                    if c.is_zero() {
                        continue;
                    }
                    for j in 0..d {
                        for k in 0..da {
                            let cur = split
                                .get(s * da + k, j)
                                .add(&c.mul(slot_basis[beta].get(k, j)));
                            split.set(s * da + k, j, cur);
                        }
                    }
                }
            }
            let mut composite = Matrix::zero(field.clone(), d, d);
            for j in 0..d {
                for s in 0..g {
                    let a_elt: Vec<Scalar> = (0..da).map(|k| split.get(s * da + k, j).clone()).collect();
                    let image = m.act(&a_elt).col(s);
                    for i in 0..d {
                        let cur = composite.get(i, j).add(&image[i]);
                        composite.set(i, j, cur);
                    }
                }
            }
            assert!(
                composite.is_identity(),
                "split-epi witness failed exact re-verification"
            );
            Ok(ProjectivityCertificate {
                verdict: Projectivity::Projective,
                generators: g,
                splitting: Some(split),
                rank_coeffs: None,
                rank_augmented: None,
            })
        }
        Err(Error::Infeasible {
            rank_coeffs,
            rank_augmented,
        }) => Ok(ProjectivityCertificate {
            verdict: Projectivity::NotProjective,
            generators: g,
            splitting: None,
            rank_coeffs: Some(rank_coeffs),
            rank_augmented: Some(rank_augmented),
        }),
        Err(e) => Err(e),
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum FreenessVerdict {
    Free { rank: usize, iso: Matrix },
    NotFree { reason: String },
    Inconclusive { reason: String },
}

impl FreenessVerdict {
    pub fn is_free(&self) -> bool {
        matches!(self, FreenessVerdict::Free { .. })
    }
}

const FREENESS_SEED: u64 = 0xF5EE;
const FREENESS_RETRIES: usize = 24;

/// Freeness test: the dimension must be divisible by dim A and a random
/// search must certify an isomorphism with A^rank. Negative verdicts carry a
/// divisibility or invariant certificate; failed sampling alone only yields
/// an inconclusive verdict.
pub fn is_free(m: &Rep) -> Result<FreenessVerdict> {
    let da = m.hopf.dim;
    if m.dim % da != 0 {
        return Ok(FreenessVerdict::NotFree {
            reason: format!("dimension {} is not divisible by dim A = {da}", m.dim),
        });
    }
    let rank = m.dim / da;
    let free = Rep::regular(&m.hopf, m.side).power(rank);
    match is_isomorphic(m, &free, FREENESS_SEED, FREENESS_RETRIES)? {
        IsoResult::Iso(iso) => Ok(FreenessVerdict::Free { rank, iso }),
        IsoResult::Disproved(reason) => Ok(FreenessVerdict::NotFree { reason }),
        IsoResult::Inconclusive => Ok(FreenessVerdict::Inconclusive {
            reason: format!(
                "no invariant mismatch found and random search failed after {FREENESS_RETRIES} draws per bound"
            ),
        }),
    }
}

/// Checks that (id (x) ev) . (coev (x) id) is the identity on the underlying
/// space of `v`, with coevaluation and evaluation built from dual bases.
pub fn coev_ev_identity(v: &Rep) -> bool {
    let d = v.dim;
    let field = v.hopf.field.clone();
    // coev (x) id : V -> V (x) V* (x) V, e_j -> sum_i e_i (x) e_i* (x) e_j.
    let mut coev_id = Matrix::zero(field.clone(), d * d * d, d);
    for j in 0..d {
        for i in 0..d {
            coev_id.set(i * d * d + i * d + j, j, field.one());
        }
    }
    // id (x) ev : V (x) V* (x) V -> V, e_a (x) e_b* (x) e_c -> <e_b*, e_c> e_a.
    let mut id_ev = Matrix::zero(field.clone(), d, d * d * d);
    for a in 0..d {
        for b in 0..d {
            id_ev.set(a, a * d * d + b * d + b, field.one());
        }
    }
    id_ev.mul(&coev_id).is_identity()
}
