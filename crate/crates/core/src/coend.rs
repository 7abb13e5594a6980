//! The module coalgebra C = Coend V = (End V)*, the convolution and twist
//! convolution products on linear maps C -> End U, the operator
//! correspondences onto End(U (x) V) and End(U (x) V*), and the halfdual
//! (partial transpose on the V tensor leg) that drives the witness recursion.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{Field, Scalar};
use crate::hopf::HopfData;
use crate::matrix::Matrix;
use crate::rep::{same_hopf, HopfRef, Rep, Side};

/// A right A-module coalgebra given by structure constants. Basis vectors of
/// C = (End V)* are the duals e_ij^* of the matrix units, at index i*v_dim+j.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModuleCoalgebra {
    pub v_dim: usize,
    pub dim: usize,
    pub comult: Vec<Vec<Vec<Scalar>>>,
    pub counit: Vec<Scalar>,
    pub right_action: Vec<Matrix>,
}

impl ModuleCoalgebra {
    /// The underlying right module.
    pub fn as_rep(&self, hopf: &HopfRef) -> Rep {
        Rep {
            hopf: hopf.clone(),
            side: Side::Right,
            dim: self.dim,
            action: self.right_action.clone(),
        }
    }

    /// Checks coassociativity, the counit laws, the right-module law, and
    /// that the action map C (x) A -> C is a coalgebra homomorphism.
    pub fn verify(&self, hopf: &HopfData) -> Result<()> {
        let d = self.dim;
        let field = &hopf.field;
        for k in 0..d {
            for i in 0..d {
                for j in 0..d {
                    for l in 0..d {
                        let mut lhs = field.zero();
                        let mut rhs = field.zero();
                        for a in 0..d {
                            lhs = lhs.add(&self.comult[k][a][l].mul(&self.comult[a][i][j]));
                            rhs = rhs.add(&self.comult[k][i][a].mul(&self.comult[a][j][l]));
                        }
                        if lhs != rhs {
                            return Err(Error::ShapeMismatch(format!(
                                "coend comultiplication not coassociative at ({k},{i},{j},{l})"
                            )));
                        }
                    }
                }
            }
        }
        for k in 0..d {
            for b in 0..d {
                let mut left = field.zero();
                let mut right = field.zero();
                for a in 0..d {
                    left = left.add(&self.comult[k][a][b].mul(&self.counit[a]));
                    right = right.add(&self.comult[k][b][a].mul(&self.counit[a]));
                }
                let expect = if k == b { field.one() } else { field.zero() };
                if left != expect || right != expect {
                    return Err(Error::ShapeMismatch(format!(
                        "coend counit law fails at ({k},{b})"
                    )));
                }
            }
        }
        // Right module law.
        let unit_act = {
            let mut m = Matrix::zero(field.clone(), d, d);
            for (k, c) in hopf.unit.iter().enumerate() {
                if !c.is_zero() {
                    m = m.add(&self.right_action[k].scale(c));
                }
            }
            m
        };
        if !unit_act.is_identity() {
            return Err(Error::ShapeMismatch("coend: 1 does not act as identity".into()));
        }
        for i in 0..hopf.dim {
            for j in 0..hopf.dim {
                let mut lhs = Matrix::zero(field.clone(), d, d);
                for (k, c) in hopf.mult[i][j].iter().enumerate() {
                    if !c.is_zero() {
                        lhs = lhs.add(&self.right_action[k].scale(c));
                    }
                }
                let rhs = self.right_action[j].mul(&self.right_action[i]);
                if lhs != rhs {
                    return Err(Error::ShapeMismatch(format!(
                        "coend right action violates the module law at ({i},{j})"
                    )));
                }
            }
        }
        // Module-coalgebra axiom: Delta(c.a) = sum (c1.a1)(x)(c2.a2) and
        // eps(c.a) = eps(c) eps(a).
        for gamma in 0..d {
            for k in 0..hopf.dim {
                let mut lhs = Matrix::zero(field.clone(), d, d);
                for delta in 0..d {
                    let coef = self.right_action[k].get(delta, gamma);
                    if coef.is_zero() {
                        continue;
                    }
                    for x in 0..d {
                        for y in 0..d {
                            let c = &self.comult[delta][x][y];
                            if c.is_zero() {
                                continue;
                            }
                            let cur = lhs.get(x, y).add(&coef.mul(c));
                            lhs.set(x, y, cur);
                        }
                    }
                }
                let mut rhs = Matrix::zero(field.clone(), d, d);
                for alpha in 0..d {
                    for beta in 0..d {
                        let cc = &self.comult[gamma][alpha][beta];
                        if cc.is_zero() {
                            continue;
                        }
                        for p in 0..hopf.dim {
                            for q in 0..hopf.dim {
                                let ca = &hopf.comult[k][p][q];
                                if ca.is_zero() {
                                    continue;
                                }
                                let coef = cc.mul(ca);
                                let col1 = self.right_action[p].col(alpha);
                                let col2 = self.right_action[q].col(beta);
                                for (x, v1) in col1.iter().enumerate() {
                                    if v1.is_zero() {
                                        continue;
                                    }
                                    let cv = coef.mul(v1);
                                    for (y, v2) in col2.iter().enumerate() {
                                        if v2.is_zero() {
                                            continue;
                                        }
                                        let cur = rhs.get(x, y).add(&cv.mul(v2));
                                        rhs.set(x, y, cur);
                                    }
                                }
                            }
                        }
                    }
                }
                if lhs != rhs {
                    return Err(Error::ShapeMismatch(format!(
                        "coend action is not a coalgebra homomorphism at (c={gamma}, a={k})"
                    )));
                }
                let mut eps_lhs = field.zero();
                for delta in 0..d {
                    eps_lhs = eps_lhs.add(&self.right_action[k].get(delta, gamma).mul(&self.counit[delta]));
                }
                let eps_rhs = self.counit[gamma].mul(&hopf.counit[k]);
                if eps_lhs != eps_rhs {
                    return Err(Error::ShapeMismatch(format!(
                        "coend counit is not multiplicative at (c={gamma}, a={k})"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Builds Coend V for a left module V: the comultiplication is dual to
/// composition of matrix units, the counit pairs with the identity, and the
/// right action is dual to a |> b = sum tau(a1) b tau(S a2) on End V.
pub fn coend(v: &Rep) -> Result<ModuleCoalgebra> {
    if v.side != Side::Left {
        return Err(Error::MixedSides);
    }
    let h = &v.hopf;
    let field = h.field.clone();
    let n = v.dim;
    let d = n * n;
    let idx = |i: usize, j: usize| i * n + j;
    let z = field.zero();

    let mut comult = vec![vec![vec![z.clone(); d]; d]; d];
    let mut counit = vec![z.clone(); d];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                comult[idx(i, j)][idx(i, k)][idx(k, j)] = field.one();
            }
            if i == j {
                counit[idx(i, j)] = field.one();
            }
        }
    }

    // tau(S e_q) for each basis vector of A.
    let tau_s: Vec<Matrix> = (0..h.dim).map(|q| v.act(&h.antipode.col(q))).collect();
    let mut right_action = Vec::with_capacity(h.dim);
    for k in 0..h.dim {
        // M[(a,b),(c,d)] = sum_{p,q} comult_A[k][p][q] tau(e_p)[a][c] tauS(e_q)[d][b]
        let mut m = Matrix::zero(field.clone(), d, d);
        for p in 0..h.dim {
            for q in 0..h.dim {
                let c = &h.comult[k][p][q];
                if c.is_zero() {
                    continue;
                }
                let tp = &v.action[p];
                let tq = &tau_s[q];
                for a in 0..n {
                    for cc in 0..n {
                        let x = tp.get(a, cc);
                        if x.is_zero() {
                            continue;
                        }
                        let cx = c.mul(x);
                        for dd in 0..n {
                            for b in 0..n {
                                let y = tq.get(dd, b);
                                if y.is_zero() {
                                    continue;
                                }
                                let cur = m.get(idx(a, b), idx(cc, dd)).add(&cx.mul(y));
                                m.set(idx(a, b), idx(cc, dd), cur);
                            }
                        }
                    }
                }
            }
        }
        // The action on C is the transpose of the action on End V.
        right_action.push(m.transpose());
    }

    Ok(ModuleCoalgebra {
        v_dim: n,
        dim: d,
        comult,
        counit,
        right_action,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    /// Operator on U (x) V.
    Even,
    /// Operator on U (x) V*.
    Odd,
}

impl Parity {
    pub fn flip(self) -> Parity {
        match self {
            Parity::Even => Parity::Odd,
            Parity::Odd => Parity::Even,
        }
    }

    pub fn of(n: i64) -> Parity {
        if n.rem_euclid(2) == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }
}

/// A linear operator on U (x) V (even parity) or U (x) V* (odd parity), in
/// the basis ordered with the U index major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EndoOnTensor {
    pub u_dim: usize,
    pub v_dim: usize,
    pub parity: Parity,
    pub matrix: Matrix,
}

impl EndoOnTensor {
    pub fn new(u_dim: usize, v_dim: usize, parity: Parity, matrix: Matrix) -> Result<EndoOnTensor> {
        if matrix.rows() != u_dim * v_dim || matrix.cols() != u_dim * v_dim {
            return Err(Error::ShapeMismatch(format!(
                "operator matrix is {}x{}, expected square of size {}",
                matrix.rows(),
                matrix.cols(),
                u_dim * v_dim
            )));
        }
        Ok(EndoOnTensor {
            u_dim,
            v_dim,
            parity,
            matrix,
        })
    }

    pub fn identity(field: Field, u_dim: usize, v_dim: usize, parity: Parity) -> EndoOnTensor {
        EndoOnTensor {
            u_dim,
            v_dim,
            parity,
            matrix: Matrix::identity(field, u_dim * v_dim),
        }
    }

    pub fn compose(&self, rhs: &EndoOnTensor) -> EndoOnTensor {
        assert_eq!(self.parity, rhs.parity, "composing operators of mixed parity");
        EndoOnTensor {
            u_dim: self.u_dim,
            v_dim: self.v_dim,
            parity: self.parity,
            matrix: self.matrix.mul(&rhs.matrix),
        }
    }

    pub fn inverse(&self) -> Result<EndoOnTensor> {
        Ok(EndoOnTensor {
            u_dim: self.u_dim,
            v_dim: self.v_dim,
            parity: self.parity,
            matrix: self.matrix.inverse()?,
        })
    }

    /// The V-slice at the matrix-unit index (i, j): the U-operator with
    /// entries [a][b] = f[(a,i),(b,j)].
    pub fn slice(&self, i: usize, j: usize) -> Matrix {
        let v = self.v_dim;
        Matrix::from_fn(self.matrix.field().clone(), self.u_dim, self.u_dim, |a, b| {
            self.matrix.get(a * v + i, b * v + j).clone()
        })
    }
}

/// Partial transpose on the second tensor factor:
/// `result[(a,i),(b,j)] = f[(a,j),(b,i)]`. An involutive linear bijection
/// End(U (x) V) <-> End(U (x) V*).
pub fn halfdual(f: &EndoOnTensor) -> EndoOnTensor {
    let v = f.v_dim;
    let matrix = Matrix::from_fn(
        f.matrix.field().clone(),
        f.matrix.rows(),
        f.matrix.cols(),
        |r, c| {
            let (a, i) = (r / v, r % v);
            let (b, j) = (c / v, c % v);
            f.matrix.get(a * v + j, b * v + i).clone()
        },
    );
    EndoOnTensor {
        u_dim: f.u_dim,
        v_dim: f.v_dim,
        parity: f.parity.flip(),
        matrix,
    }
}

/// A linear map C -> End U stored through its values on the dual matrix-unit
/// basis of C = (End V)*; equivalently an element of End U (x) End V.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvMap {
    pub u_dim: usize,
    pub v_dim: usize,
    /// blocks[i*v_dim+j] = f(e_ij^*)
    pub blocks: Vec<Matrix>,
}

impl ConvMap {
    pub fn block(&self, i: usize, j: usize) -> &Matrix {
        &self.blocks[i * self.v_dim + j]
    }

    /// The convolution unit c -> eps(c) 1.
    pub fn unit(field: &Field, u_dim: usize, v_dim: usize) -> ConvMap {
        let blocks = (0..v_dim * v_dim)
            .map(|idx| {
                let (i, j) = (idx / v_dim, idx % v_dim);
                if i == j {
                    Matrix::identity(field.clone(), u_dim)
                } else {
                    Matrix::zero(field.clone(), u_dim, u_dim)
                }
            })
            .collect();
        ConvMap {
            u_dim,
            v_dim,
            blocks,
        }
    }

    pub fn is_unit(&self) -> bool {
        for i in 0..self.v_dim {
            for j in 0..self.v_dim {
                let b = self.block(i, j);
                if i == j {
                    if !b.is_identity() {
                        return false;
                    }
                } else if !b.is_zero() {
                    return false;
                }
            }
        }
        true
    }
}

/// Convolution (f*g)(c) = sum f(c1) g(c2); on the matrix-unit duals this is
/// (f*g)(e_il^*) = sum_j f(e_ij^*) g(e_jl^*).
pub fn conv_mul(f: &ConvMap, g: &ConvMap) -> ConvMap {
    assert_eq!((f.u_dim, f.v_dim), (g.u_dim, g.v_dim), "mismatched maps");
    let field = f.blocks[0].field().clone();
    let mut blocks = Vec::with_capacity(f.blocks.len());
    for i in 0..f.v_dim {
        for l in 0..f.v_dim {
            let mut acc = Matrix::zero(field.clone(), f.u_dim, f.u_dim);
            for j in 0..f.v_dim {
                acc = acc.add(&f.block(i, j).mul(g.block(j, l)));
            }
            blocks.push(acc);
        }
    }
    ConvMap {
        u_dim: f.u_dim,
        v_dim: f.v_dim,
        blocks,
    }
}

/// Twist convolution (f x g)(c) = sum f(c2) g(c1); on the matrix-unit duals
/// (f x g)(e_il^*) = sum_j f(e_jl^*) g(e_ij^*).
pub fn twist_conv_mul(f: &ConvMap, g: &ConvMap) -> ConvMap {
    assert_eq!((f.u_dim, f.v_dim), (g.u_dim, g.v_dim), "mismatched maps");
    let field = f.blocks[0].field().clone();
    let mut blocks = Vec::with_capacity(f.blocks.len());
    for i in 0..f.v_dim {
        for l in 0..f.v_dim {
            let mut acc = Matrix::zero(field.clone(), f.u_dim, f.u_dim);
            for j in 0..f.v_dim {
                acc = acc.add(&f.block(j, l).mul(g.block(i, j)));
            }
            blocks.push(acc);
        }
    }
    ConvMap {
        u_dim: f.u_dim,
        v_dim: f.v_dim,
        blocks,
    }
}

/// The canonical bijection Hom(C, End U) = End U (x) End V = End(U (x) V)
/// in the even case; for the odd case the second factor passes to dual
/// operators, landing in End(U (x) V*). Convolution becomes composition in
/// the even picture, twist convolution in the odd one.
pub fn to_endo(f: &ConvMap, parity: Parity) -> EndoOnTensor {
    let field = f.blocks[0].field().clone();
    let (u, v) = (f.u_dim, f.v_dim);
    let matrix = Matrix::from_fn(field, u * v, u * v, |r, c| {
        let (a, i) = (r / v, r % v);
        let (b, j) = (c / v, c % v);
        match parity {
            Parity::Even => f.block(i, j).get(a, b).clone(),
            Parity::Odd => f.block(j, i).get(a, b).clone(),
        }
    });
    EndoOnTensor {
        u_dim: u,
        v_dim: v,
        parity,
        matrix,
    }
}

/// Inverse of `to_endo` at the operator's own parity.
pub fn from_endo(e: &EndoOnTensor) -> ConvMap {
    let (u, v) = (e.u_dim, e.v_dim);
    let mut blocks = Vec::with_capacity(v * v);
    for i in 0..v {
        for j in 0..v {
            let m = match e.parity {
                Parity::Even => e.slice(i, j),
                Parity::Odd => e.slice(j, i),
            };
            blocks.push(m);
        }
    }
    let _ = u;
    ConvMap {
        u_dim: e.u_dim,
        v_dim: v,
        blocks,
    }
}

/// Exact convolution inverse computed through the even operator picture.
pub fn conv_inverse(f: &ConvMap) -> Result<ConvMap> {
    let e = to_endo(f, Parity::Even);
    let inv = e
        .matrix
        .inverse()
        .map_err(|_| Error::NotConvInvertible)?;
    let einv = EndoOnTensor {
        u_dim: e.u_dim,
        v_dim: e.v_dim,
        parity: Parity::Even,
        matrix: inv,
    };
    let g = from_endo(&einv);
    debug_assert!(conv_mul(f, &g).is_unit());
    debug_assert!(conv_mul(&g, f).is_unit());
    Ok(g)
}

/// Exact intertwiner check on the Hopf algebra's generator set.
pub fn is_intertwiner(m: &Matrix, src: &Rep, tgt: &Rep) -> bool {
    debug_assert_eq!(src.side, tgt.side);
    for &g in &src.hopf.gens {
        if tgt.action[g].mul(m) != m.mul(&src.action[g]) {
            return false;
        }
    }
    true
}

/// The twisted-structure intertwiner conditions: for even n, `f` must be a
/// morphism of left modules U_{S^n} (x) V -> U_triv (x) V; for odd n, a
/// morphism of right modules U_triv (x) V* -> U_{S^n} (x) V*.
pub fn check_cond(f: &EndoOnTensor, n: i64, u: &Rep, v: &Rep) -> Result<bool> {
    if Parity::of(n) != f.parity {
        return Err(Error::ShapeMismatch(format!(
            "operator parity {:?} does not match twist exponent {n}",
            f.parity
        )));
    }
    if u.side != Side::Left || v.side != Side::Left {
        return Err(Error::MixedSides);
    }
    if !same_hopf(&u.hopf, &v.hopf) {
        return Err(Error::MixedSides);
    }
    if u.dim != f.u_dim || v.dim != f.v_dim {
        return Err(Error::ShapeMismatch(format!(
            "operator is {}x{} on tensor legs, modules are {} and {}",
            f.u_dim, f.v_dim, u.dim, v.dim
        )));
    }
    let (src, tgt) = match f.parity {
        Parity::Even => {
            let src = u.twist(n)?.tensor(v)?;
            let tgt = Rep::trivial(&u.hopf, u.dim, Side::Left).tensor(v)?;
            (src, tgt)
        }
        Parity::Odd => {
            let vstar = v.dual();
            let src = Rep::trivial(&u.hopf, u.dim, Side::Right).tensor(&vstar)?;
            let tgt = u.twist(n)?.tensor(&vstar)?;
            (src, tgt)
        }
    };
    Ok(is_intertwiner(&f.matrix, &src, &tgt))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hopf::{build_group_algebra, cyclic_table};
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;
    use std::sync::Arc;

    fn f2c2() -> HopfRef {
        Arc::new(build_group_algebra(&cyclic_table(2), Field::prime(2).unwrap()).unwrap())
    }

    fn random_endo(u: usize, v: usize, parity: Parity, rng: &mut ChaCha20Rng) -> EndoOnTensor {
        let field = Field::Rational;
        let matrix = Matrix::from_fn(field.clone(), u * v, u * v, |_, _| {
            field.from_i64(rng.gen_range(-3..=3))
        });
        EndoOnTensor {
            u_dim: u,
            v_dim: v,
            parity,
            matrix,
        }
    }

    fn random_conv_map(u: usize, v: usize, rng: &mut ChaCha20Rng) -> ConvMap {
        let field = Field::Rational;
        let blocks = (0..v * v)
            .map(|_| {
                Matrix::from_fn(field.clone(), u, u, |_, _| field.from_i64(rng.gen_range(-3..=3)))
            })
            .collect();
        ConvMap {
            u_dim: u,
            v_dim: v,
            blocks,
        }
    }

    #[test]
    fn coend_dims_and_counit() {
        let h = f2c2();
        let v = Rep::regular(&h, Side::Left);
        let c = coend(&v).unwrap();
        assert_eq!(c.dim, v.dim * v.dim);
        for i in 0..v.dim {
            for j in 0..v.dim {
                let expect = if i == j { h.field.one() } else { h.field.zero() };
                assert_eq!(c.counit[i * v.dim + j], expect);
            }
        }
        c.verify(&h).unwrap();
        c.as_rep(&h).check_module_law().unwrap();
    }

    #[test]
    fn coend_action_matches_bruteforce_dualization() {
        // Independently dualize a |> b = sum tau(a1) b tau(S a2) on all
        // basis pairs and compare pairings.
        let h = f2c2();
        let v = Rep::regular(&h, Side::Left);
        let c = coend(&v).unwrap();
        let n = v.dim;
        let idx = |i: usize, j: usize| i * n + j;
        for k in 0..h.dim {
            for p in 0..n {
                for q in 0..n {
                    // a |> E_pq by explicit composition.
                    let mut unit = Matrix::zero(h.field.clone(), n, n);
                    unit.set(p, q, h.field.one());
                    let mut acted = Matrix::zero(h.field.clone(), n, n);
                    for a1 in 0..h.dim {
                        for a2 in 0..h.dim {
                            let co = &h.comult[k][a1][a2];
                            if co.is_zero() {
                                continue;
                            }
                            let left = &v.action[a1];
                            let right = v.act(&h.antipode.col(a2));
                            acted = acted.add(&left.mul(&unit).mul(&right).scale(co));
                        }
                    }
                    // <e_ij^* . e_k, E_pq> must equal <e_ij^*, e_k |> E_pq>.
                    for i in 0..n {
                        for j in 0..n {
                            let lhs = c.right_action[k].get(idx(p, q), idx(i, j));
                            let rhs = acted.get(i, j);
                            assert_eq!(lhs, rhs, "mismatch at a={k}, c=({i},{j}), E=({p},{q})");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn convolution_units() {
        let mut rng = ChaCha20Rng::seed_from_u64(5);
        let f = random_conv_map(2, 2, &mut rng);
        let unit = ConvMap::unit(&Field::Rational, 2, 2);
        assert_eq!(conv_mul(&unit, &f), f);
        assert_eq!(conv_mul(&f, &unit), f);
        assert_eq!(twist_conv_mul(&unit, &f), f);
        assert_eq!(twist_conv_mul(&f, &unit), f);
        assert!(to_endo(&unit, Parity::Even).matrix.is_identity());
        assert!(to_endo(&unit, Parity::Odd).matrix.is_identity());
    }

    #[test]
    fn correspondence_carries_products_to_composition() {
        let mut rng = ChaCha20Rng::seed_from_u64(11);
        for _ in 0..8 {
            let f = random_conv_map(2, 2, &mut rng);
            let g = random_conv_map(2, 2, &mut rng);
            let even = to_endo(&conv_mul(&f, &g), Parity::Even);
            let composed = to_endo(&f, Parity::Even).compose(&to_endo(&g, Parity::Even));
            assert_eq!(even, composed);

            let odd = to_endo(&twist_conv_mul(&f, &g), Parity::Odd);
            let composed = to_endo(&f, Parity::Odd).compose(&to_endo(&g, Parity::Odd));
            assert_eq!(odd, composed);
        }
    }

    #[test]
    fn associativity_transport_on_triples() {
        let mut rng = ChaCha20Rng::seed_from_u64(13);
        for _ in 0..4 {
            let f = random_conv_map(2, 3, &mut rng);
            let g = random_conv_map(2, 3, &mut rng);
            let h = random_conv_map(2, 3, &mut rng);
            assert_eq!(
                conv_mul(&conv_mul(&f, &g), &h),
                conv_mul(&f, &conv_mul(&g, &h))
            );
            assert_eq!(
                twist_conv_mul(&twist_conv_mul(&f, &g), &h),
                twist_conv_mul(&f, &twist_conv_mul(&g, &h))
            );
        }
    }

    #[test]
    fn round_trips() {
        let mut rng = ChaCha20Rng::seed_from_u64(17);
        let f = random_conv_map(2, 3, &mut rng);
        for parity in [Parity::Even, Parity::Odd] {
            let e = to_endo(&f, parity);
            assert_eq!(from_endo(&e), f);
        }
        let e = random_endo(3, 2, Parity::Even, &mut rng);
        assert_eq!(to_endo(&from_endo(&e), Parity::Even), e);
    }

    #[test]
    fn halfdual_laws() {
        let mut rng = ChaCha20Rng::seed_from_u64(23);
        // (alpha (x) beta)^flat = alpha (x) beta^T in dual bases.
        let field = Field::Rational;
        let alpha = Matrix::from_fn(field.clone(), 2, 2, |_, _| field.from_i64(rng.gen_range(-3..=3)));
        let beta = Matrix::from_fn(field.clone(), 3, 3, |_, _| field.from_i64(rng.gen_range(-3..=3)));
        let f = EndoOnTensor::new(2, 3, Parity::Even, alpha.kronecker(&beta)).unwrap();
        let expect = alpha.kronecker(&beta.transpose());
        assert_eq!(halfdual(&f).matrix, expect);

        // Involution and identity preservation.
        let g = random_endo(3, 3, Parity::Even, &mut rng);
        assert_eq!(halfdual(&halfdual(&g)), g);
        let id = EndoOnTensor::identity(field, 2, 2, Parity::Even);
        assert!(halfdual(&id).matrix.is_identity());
    }

    #[test]
    fn halfdual_defining_index_identity() {
        // f^flat[(a,j),(u,m)] = f[(a,m),(u,j)] for all indices: the
        // defining property of the partial transpose.
        let mut rng = ChaCha20Rng::seed_from_u64(29);
        for _ in 0..4 {
            let f = random_endo(2, 3, Parity::Even, &mut rng);
            let fd = halfdual(&f);
            let v = f.v_dim;
            for a in 0..f.u_dim {
                for u in 0..f.u_dim {
                    for j in 0..v {
                        for m in 0..v {
                            assert_eq!(
                                fd.matrix.get(a * v + j, u * v + m),
                                f.matrix.get(a * v + m, u * v + j)
                            );
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn conv_inverse_basics() {
        let unit = ConvMap::unit(&Field::Rational, 2, 2);
        assert_eq!(conv_inverse(&unit).unwrap(), unit);

        // Dual route: the twist-image of the inverse is halfdual(E^{ -1 }).
        let mut rng = ChaCha20Rng::seed_from_u64(31);
        loop {
            let f = random_conv_map(2, 2, &mut rng);
            let e = to_endo(&f, Parity::Even);
            if !e.matrix.is_invertible() {
                continue;
            }
            let g = conv_inverse(&f).unwrap();
            assert!(conv_mul(&f, &g).is_unit());
            assert!(conv_mul(&g, &f).is_unit());
            let twist_image = to_endo(&g, Parity::Odd);
            let expect = halfdual(&e.inverse().unwrap());
            assert_eq!(twist_image.matrix, expect.matrix);
            break;
        }

        // Singular operator image.
        let zero = ConvMap {
            u_dim: 2,
            v_dim: 2,
            blocks: vec![Matrix::zero(Field::Rational, 2, 2); 4],
        };
        assert!(matches!(conv_inverse(&zero), Err(Error::NotConvInvertible)));
    }

    #[test]
    fn check_cond_trivial_cases() {
        let h = f2c2();
        let v = Rep::regular(&h, Side::Left);
        let triv_u = Rep::trivial(&h, 2, Side::Left);
        let id = EndoOnTensor::identity(h.field.clone(), 2, 2, Parity::Even);
        // Identity with trivially-acting U intertwines U (x) V -> U_triv (x) V.
        assert!(check_cond(&id, 0, &triv_u, &v).unwrap());
        // With U regular the source and target structures differ.
        let reg_u = Rep::regular(&h, Side::Left);
        assert!(!check_cond(&id, 0, &reg_u, &v).unwrap());
        // Parity mismatch is an error.
        assert!(check_cond(&id, 1, &triv_u, &v).is_err());
    }
}
