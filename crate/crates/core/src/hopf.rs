//! Finite-dimensional Hopf algebras as structure constants in a fixed
//! ordered basis, exhaustive axiom verification, and the canonical builders
//! (group algebras, the 4-dimensional nonsemisimple algebra of dimension-4
//! Taft type, and the general Taft algebras).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{Field, Scalar};
use crate::matrix::Matrix;

/// Structure constants of a finite-dimensional Hopf algebra:
/// `e_i * e_j = sum_k mult[i][j][k] e_k` and
/// `Delta(e_k) = sum_{i,j} comult[k][i][j] e_i (x) e_j`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HopfData {
    pub field: Field,
    pub dim: usize,
    pub mult: Vec<Vec<Vec<Scalar>>>,
    pub unit: Vec<Scalar>,
    pub comult: Vec<Vec<Vec<Scalar>>>,
    pub counit: Vec<Scalar>,
    pub antipode: Matrix,
    /// Indices of a set of algebra generators. A hint used to cut down
    /// intertwiner checks; the full basis is always a valid choice.
    #[serde(skip)]
    pub gens: Vec<usize>,
}

impl HopfData {
    /// Restores invariants after deserialization and checks tensor shapes.
    pub fn normalize(mut self) -> Result<HopfData> {
        self.check_shapes()?;
        if self.gens.is_empty() {
            self.gens = (0..self.dim).collect();
        }
        Ok(self)
    }

    pub fn check_shapes(&self) -> Result<()> {
        let d = self.dim;
        let bad = |what: &str| Err(Error::ShapeMismatch(format!("{what} does not match dim {d}")));
        if self.mult.len() != d || self.mult.iter().any(|p| p.len() != d || p.iter().any(|r| r.len() != d)) {
            return bad("mult tensor");
        }
        if self.comult.len() != d
            || self.comult.iter().any(|p| p.len() != d || p.iter().any(|r| r.len() != d))
        {
            return bad("comult tensor");
        }
        if self.unit.len() != d || self.counit.len() != d {
            return bad("unit/counit vector");
        }
        if self.antipode.rows() != d || self.antipode.cols() != d {
            return bad("antipode matrix");
        }
        Ok(())
    }

    /// Coordinates of the product of two coordinate vectors.
    pub fn product_vec(&self, a: &[Scalar], b: &[Scalar]) -> Vec<Scalar> {
        let mut out = vec![self.field.zero(); self.dim];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                if y.is_zero() {
                    continue;
                }
                let xy = x.mul(y);
                for (k, m) in self.mult[i][j].iter().enumerate() {
                    if m.is_zero() {
                        continue;
                    }
                    out[k] = out[k].add(&xy.mul(m));
                }
            }
        }
        out
    }

    pub fn basis_vec(&self, i: usize) -> Vec<Scalar> {
        let mut v = vec![self.field.zero(); self.dim];
        v[i] = self.field.one();
        v
    }

    pub fn counit_of(&self, a: &[Scalar]) -> Scalar {
        let mut out = self.field.zero();
        for (i, x) in a.iter().enumerate() {
            if !x.is_zero() {
                out = out.add(&x.mul(&self.counit[i]));
            }
        }
        out
    }

    pub fn antipode_of(&self, a: &[Scalar]) -> Vec<Scalar> {
        self.antipode.mul_vec(a)
    }

    /// Matrix of left multiplication by `e_i`: column `j` holds `e_i * e_j`.
    pub fn left_mult_matrix(&self, i: usize) -> Matrix {
        Matrix::from_fn(self.field.clone(), self.dim, self.dim, |k, j| {
            self.mult[i][j][k].clone()
        })
    }

    /// Matrix of right multiplication by `e_i`: column `j` holds `e_j * e_i`.
    pub fn right_mult_matrix(&self, i: usize) -> Matrix {
        Matrix::from_fn(self.field.clone(), self.dim, self.dim, |k, j| {
            self.mult[j][i][k].clone()
        })
    }

    /// Comultiplication of a coordinate vector as a dim x dim coefficient grid.
    pub fn comult_of(&self, a: &[Scalar]) -> Matrix {
        let mut out = Matrix::zero(self.field.clone(), self.dim, self.dim);
        for (k, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for i in 0..self.dim {
                for j in 0..self.dim {
                    let c = &self.comult[k][i][j];
                    if c.is_zero() {
                        continue;
                    }
                    let cur = out.get(i, j).add(&x.mul(c));
                    out.set(i, j, cur);
                }
            }
        }
        out
    }

    /// Structural equality of the underlying data, ignoring generator hints.
    pub fn structure_eq(&self, other: &HopfData) -> bool {
        self.field == other.field
            && self.dim == other.dim
            && self.mult == other.mult
            && self.unit == other.unit
            && self.comult == other.comult
            && self.counit == other.counit
            && self.antipode == other.antipode
    }

    pub fn to_canonical_json(&self) -> String {
        serde_json::to_string(self).expect("HopfData serialization cannot fail")
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AxiomCheck {
    pub name: String,
    pub pass: bool,
    /// First violating index tuple in lexicographic order, when failing.
    pub witness: Option<Vec<usize>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AxiomReport {
    pub pass: bool,
    pub axioms: Vec<AxiomCheck>,
}

impl AxiomReport {
    pub fn all_pass(&self) -> bool {
        self.pass
    }

    pub fn failing(&self) -> Vec<&AxiomCheck> {
        self.axioms.iter().filter(|a| !a.pass).collect()
    }
}

/// Exhaustively checks every Hopf algebra axiom over basis tuples.
pub fn verify_hopf(h: &HopfData) -> Result<AxiomReport> {
    h.check_shapes()?;
    let d = h.dim;
    let field = &h.field;
    let mut axioms = Vec::new();

    let mut record = |name: &str, witness: Option<Vec<usize>>| {
        axioms.push(AxiomCheck {
            name: name.to_string(),
            pass: witness.is_none(),
            witness,
        });
    };

    // Associativity: (e_i e_j) e_k = e_i (e_j e_k).
    let mut w = None;
    'assoc: for i in 0..d {
        for j in 0..d {
            for k in 0..d {
                let mut lhs = vec![field.zero(); d];
                let mut rhs = vec![field.zero(); d];
                for m in 0..d {
                    let c = &h.mult[i][j][m];
                    if !c.is_zero() {
                        for (l, x) in h.mult[m][k].iter().enumerate() {
                            if !x.is_zero() {
                                lhs[l] = lhs[l].add(&c.mul(x));
                            }
                        }
                    }
                    let c = &h.mult[j][k][m];
                    if !c.is_zero() {
                        for (l, x) in h.mult[i][m].iter().enumerate() {
                            if !x.is_zero() {
                                rhs[l] = rhs[l].add(&c.mul(x));
                            }
                        }
                    }
                }
                if lhs != rhs {
                    w = Some(vec![i, j, k]);
                    break 'assoc;
                }
            }
        }
    }
    record("associativity", w);

    // Two-sided unit.
    let mut w = None;
    'unit: for j in 0..d {
        let left = h.product_vec(&h.unit, &h.basis_vec(j));
        let right = h.product_vec(&h.basis_vec(j), &h.unit);
        if left != h.basis_vec(j) || right != h.basis_vec(j) {
            w = Some(vec![j]);
            break 'unit;
        }
    }
    record("unit", w);

    // Coassociativity: (Delta x id) Delta = (id x Delta) Delta.
    let mut w = None;
    'coassoc: for k in 0..d {
        for i in 0..d {
            for j in 0..d {
                for l in 0..d {
                    let mut lhs = field.zero();
                    let mut rhs = field.zero();
                    for a in 0..d {
                        let c1 = &h.comult[k][a][l];
                        if !c1.is_zero() {
                            lhs = lhs.add(&c1.mul(&h.comult[a][i][j]));
                        }
                        let c2 = &h.comult[k][i][a];
                        if !c2.is_zero() {
                            rhs = rhs.add(&c2.mul(&h.comult[a][j][l]));
                        }
                    }
                    if lhs != rhs {
                        w = Some(vec![k, i, j]);
                        break 'coassoc;
                    }
                }
            }
        }
    }
    record("coassociativity", w);

    // Two-sided counit: (eps x id) Delta = id = (id x eps) Delta.
    let mut w = None;
    'counit: for k in 0..d {
        for b in 0..d {
            let mut left = field.zero();
            let mut right = field.zero();
            for a in 0..d {
                left = left.add(&h.comult[k][a][b].mul(&h.counit[a]));
                right = right.add(&h.comult[k][b][a].mul(&h.counit[a]));
            }
            let expect = if k == b { field.one() } else { field.zero() };
            if left != expect || right != expect {
                w = Some(vec![k]);
                break 'counit;
            }
        }
    }
    record("counit", w);

    // Delta is an algebra homomorphism on products of basis vectors.
    let mut w = None;
    'dmult: for i in 0..d {
        for j in 0..d {
            let mut lhs = Matrix::zero(field.clone(), d, d);
            for k in 0..d {
                let m = &h.mult[i][j][k];
                if m.is_zero() {
                    continue;
                }
                for a in 0..d {
                    for b in 0..d {
                        let c = &h.comult[k][a][b];
                        if c.is_zero() {
                            continue;
                        }
                        let cur = lhs.get(a, b).add(&m.mul(c));
                        lhs.set(a, b, cur);
                    }
                }
            }
            let mut rhs = Matrix::zero(field.clone(), d, d);
            for p in 0..d {
                for q in 0..d {
                    let ci = &h.comult[i][p][q];
                    if ci.is_zero() {
                        continue;
                    }
                    for r in 0..d {
                        for s in 0..d {
                            let cj = &h.comult[j][r][s];
                            if cj.is_zero() {
                                continue;
                            }
                            let coeff = ci.mul(cj);
                            for (a, ma) in h.mult[p][r].iter().enumerate() {
                                if ma.is_zero() {
                                    continue;
                                }
                                let ca = coeff.mul(ma);
                                for (b, mb) in h.mult[q][s].iter().enumerate() {
                                    if mb.is_zero() {
                                        continue;
                                    }
                                    let cur = rhs.get(a, b).add(&ca.mul(mb));
                                    rhs.set(a, b, cur);
                                }
                            }
                        }
                    }
                }
            }
            if lhs != rhs {
                w = Some(vec![i, j]);
                break 'dmult;
            }
        }
    }
    record("comult_respects_mult", w);

    // Delta(1) = 1 (x) 1.
    let mut w = None;
    let delta_one = h.comult_of(&h.unit);
    'dunit: for a in 0..d {
        for b in 0..d {
            let expect = h.unit[a].mul(&h.unit[b]);
            if *delta_one.get(a, b) != expect {
                w = Some(vec![a, b]);
                break 'dunit;
            }
        }
    }
    record("comult_respects_unit", w);

    // eps is an algebra homomorphism.
    let mut w = None;
    'emult: for i in 0..d {
        for j in 0..d {
            let lhs = h.counit_of(&h.mult[i][j]);
            let rhs = h.counit[i].mul(&h.counit[j]);
            if lhs != rhs {
                w = Some(vec![i, j]);
                break 'emult;
            }
        }
    }
    record("counit_respects_mult", w);

    let eps_one = h.counit_of(&h.unit);
    record(
        "counit_respects_unit",
        if eps_one.is_one() { None } else { Some(vec![0]) },
    );

    // Antipode axioms: m(S x id)Delta = unit . eps = m(id x S)Delta.
    let mut w_left = None;
    let mut w_right = None;
    for k in 0..d {
        let mut left = vec![field.zero(); d];
        let mut right = vec![field.zero(); d];
        for a in 0..d {
            for b in 0..d {
                let c = &h.comult[k][a][b];
                if c.is_zero() {
                    continue;
                }
                let sa = h.antipode.col(a);
                let sb = h.antipode.col(b);
                let term_l = h.product_vec(&sa, &h.basis_vec(b));
                let term_r = h.product_vec(&h.basis_vec(a), &sb);
                for l in 0..d {
                    left[l] = left[l].add(&c.mul(&term_l[l]));
                    right[l] = right[l].add(&c.mul(&term_r[l]));
                }
            }
        }
        let expect: Vec<Scalar> = h.unit.iter().map(|u| u.mul(&h.counit[k])).collect();
        if left != expect && w_left.is_none() {
            w_left = Some(vec![k]);
        }
        if right != expect && w_right.is_none() {
            w_right = Some(vec![k]);
        }
    }
    record("antipode_left", w_left);
    record("antipode_right", w_right);

    let pass = axioms.iter().all(|a| a.pass);
    Ok(AxiomReport { pass, axioms })
}

/// Multiplication table of the cyclic group of order n.
pub fn cyclic_table(n: usize) -> Vec<Vec<usize>> {
    (0..n).map(|i| (0..n).map(|j| (i + j) % n).collect()).collect()
}

/// Group algebra k[G] from a multiplication table: table[i][j] is the index
/// of g_i g_j. Group axioms are checked before building.
pub fn build_group_algebra(table: &[Vec<usize>], field: Field) -> Result<HopfData> {
    let n = table.len();
    if n == 0 {
        return Err(Error::NotAGroup("empty table".into()));
    }
    for row in table {
        if row.len() != n || row.iter().any(|&v| v >= n) {
            return Err(Error::NotAGroup("table is not a square array of indices".into()));
        }
    }
    // Identity.
    let mut identity = None;
    for e in 0..n {
        if (0..n).all(|j| table[e][j] == j && table[j][e] == j) {
            identity = Some(e);
            break;
        }
    }
    let Some(e) = identity else {
        return Err(Error::NotAGroup("no identity element".into()));
    };
    // Associativity.
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                if table[table[i][j]][k] != table[i][table[j][k]] {
                    return Err(Error::NotAGroup(format!(
                        "associativity fails at ({i},{j},{k})"
                    )));
                }
            }
        }
    }
    // Inverses.
    let mut inv = vec![0usize; n];
    for g in 0..n {
        match (0..n).find(|&h| table[g][h] == e && table[h][g] == e) {
            Some(h) => inv[g] = h,
            None => return Err(Error::NotAGroup(format!("element {g} has no inverse"))),
        }
    }

    let z = field.zero();
    let o = field.one();
    let mut mult = vec![vec![vec![z.clone(); n]; n]; n];
    let mut comult = vec![vec![vec![z.clone(); n]; n]; n];
    for i in 0..n {
        for j in 0..n {
            mult[i][j][table[i][j]] = o.clone();
        }
        comult[i][i][i] = o.clone();
    }
    let mut unit = vec![z.clone(); n];
    unit[e] = o.clone();
    let counit = vec![o.clone(); n];
    let antipode = Matrix::from_fn(field.clone(), n, n, |i, j| {
        if inv[j] == i {
            field.one()
        } else {
            field.zero()
        }
    });
    Ok(HopfData {
        field,
        dim: n,
        mult,
        unit,
        comult,
        counit,
        antipode,
        gens: (0..n).collect(),
    })
}

/// Gaussian binomial coefficients [b; j]_q for j = 0..=b.
fn gaussian_binomials(b: usize, q: &Scalar, field: &Field) -> Vec<Scalar> {
    let mut row = vec![field.one()];
    for _ in 1..=b {
        let prev = row;
        let mut next = vec![field.one(); prev.len() + 1];
        for j in 1..prev.len() {
            // [b; j] = [b-1; j-1] + q^j [b-1; j]
            next[j] = prev[j - 1].add(&q.pow(j as u64).mul(&prev[j]));
        }
        row = next;
    }
    row
}

/// Taft algebra of dimension n^2: relations g^n = 1, x^n = 0, xg = q gx, with
/// Delta(g) = g(x)g, Delta(x) = x(x)1 + g(x)x, for q a primitive n-th root of
/// unity. Basis element g^a x^b sits at index b*n + a.
pub fn build_taft(n: usize, field: Field) -> Result<HopfData> {
    if n < 2 {
        return Err(Error::Parse("Taft algebras need n >= 2".into()));
    }
    let q = field.primitive_root(n)?;
    build_taft_with_root(n, field, q)
}

pub fn build_taft_with_root(n: usize, field: Field, q: Scalar) -> Result<HopfData> {
    // q must be primitive of order exactly n.
    if !q.pow(n as u64).is_one() {
        return Err(Error::BadRoot {
            n,
            reason: "q^n != 1".into(),
        });
    }
    for d in 1..n {
        if n % d == 0 && q.pow(d as u64).is_one() {
            return Err(Error::BadRoot {
                n,
                reason: format!("q has order {d} < {n}"),
            });
        }
    }
    let d = n * n;
    let idx = |a: usize, b: usize| b * n + a;
    let z = field.zero();
    let mut mult = vec![vec![vec![z.clone(); d]; d]; d];
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for e in 0..n {
                    if b + e >= n {
                        continue; // x^n = 0
                    }
                    let coeff = q.pow((b * c) as u64);
                    mult[idx(a, b)][idx(c, e)][idx((a + c) % n, b + e)] = coeff;
                }
            }
        }
    }
    let mut comult = vec![vec![vec![z.clone(); d]; d]; d];
    for a in 0..n {
        for b in 0..n {
            let binoms = gaussian_binomials(b, &q, &field);
            for (j, coeff) in binoms.iter().enumerate() {
                // (g^{a+j} x^{b-j}) (x) (g^a x^j)
                let first = idx((a + j) % n, b - j);
                let second = idx(a, j);
                comult[idx(a, b)][first][second] = coeff.clone();
            }
        }
    }
    let mut unit = vec![z.clone(); d];
    unit[idx(0, 0)] = field.one();
    let mut counit = vec![z.clone(); d];
    for a in 0..n {
        counit[idx(a, 0)] = field.one();
    }
    // S(g^a x^b) = S(x)^b S(g)^a with S(g) = g^{n-1}, S(x) = -g^{n-1} x,
    // computed by exact monomial multiplication.
    let mut antipode = Matrix::zero(field.clone(), d, d);
    for a in 0..n {
        for b in 0..n {
            // Accumulate the product as (coeff, g-power, x-power).
            let mut coeff = field.one();
            let mut gp = 0usize;
            let mut xp = 0usize;
            for _ in 0..b {
                // multiply on the right by -g^{n-1} x:
                // (g^gp x^xp)(g^{n-1} x) = q^{xp (n-1)} g^{gp+n-1} x^{xp+1}
                coeff = coeff.neg().mul(&q.pow((xp * (n - 1)) as u64));
                gp = (gp + n - 1) % n;
                xp += 1;
            }
            for _ in 0..a {
                // multiply on the right by g^{n-1}
                coeff = coeff.mul(&q.pow((xp * (n - 1)) as u64));
                gp = (gp + n - 1) % n;
            }
            if xp < n {
                antipode.set(idx(gp, xp), idx(a, b), coeff);
            }
        }
    }
    Ok(HopfData {
        field,
        dim: d,
        mult,
        unit,
        comult,
        counit,
        antipode,
        gens: vec![idx(1, 0), idx(0, 1)],
    })
}

/// The 4-dimensional nonsemisimple Hopf algebra with basis {1, g, x, gx},
/// relations g^2 = 1, x^2 = 0, xg = -gx. Coincides with the n = 2 Taft
/// algebra when a primitive square root of unity exists.
pub fn build_sweedler(field: Field) -> Result<HopfData> {
    build_taft(2, field)
}

/// Matrix of S^n. Negative powers require the antipode to be invertible.
pub fn antipode_power(h: &HopfData, n: i64) -> Result<Matrix> {
    let d = h.dim;
    if n == 0 {
        return Ok(Matrix::identity(h.field.clone(), d));
    }
    let base = if n > 0 {
        h.antipode.clone()
    } else {
        h.antipode
            .inverse()
            .map_err(|_| Error::NonInvertibleAntipode)?
    };
    let mut out = Matrix::identity(h.field.clone(), d);
    for _ in 0..n.unsigned_abs() {
        out = out.mul(&base);
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum IntegralSide {
    Left,
    Right,
}

/// Basis of the space of left (or right) integrals
/// { L : a L = eps(a) L for all a }.
pub fn integral_space(h: &HopfData, side: IntegralSide) -> Vec<Vec<Scalar>> {
    let d = h.dim;
    let mut rows: Vec<Vec<Scalar>> = Vec::with_capacity(d * d);
    for i in 0..d {
        let m = match side {
            IntegralSide::Left => h.left_mult_matrix(i),
            IntegralSide::Right => h.right_mult_matrix(i),
        };
        for k in 0..d {
            let mut row = Vec::with_capacity(d);
            for j in 0..d {
                let mut v = m.get(k, j).clone();
                if k == j {
                    v = v.sub(&h.counit[i]);
                }
                row.push(v);
            }
            rows.push(row);
        }
    }
    let mat = Matrix::from_rows(h.field.clone(), rows);
    mat.kernel_basis()
}

/// Maschke-type test: the Hopf algebra is semisimple iff the counit does not
/// vanish on a nonzero integral.
pub fn is_semisimple(h: &HopfData) -> Result<bool> {
    let ints = integral_space(h, IntegralSide::Left);
    if ints.len() != 1 {
        return Err(Error::ShapeMismatch(format!(
            "integral space has dimension {}, expected 1",
            ints.len()
        )));
    }
    Ok(!h.counit_of(&ints[0]).is_zero())
}

/// The dual Hopf algebra on the dual basis: multiplication and
/// comultiplication tensors swap roles, the antipode transposes.
pub fn dualize(h: &HopfData) -> HopfData {
    let d = h.dim;
    let z = h.field.zero();
    let mut mult = vec![vec![vec![z.clone(); d]; d]; d];
    let mut comult = vec![vec![vec![z.clone(); d]; d]; d];
    for i in 0..d {
        for j in 0..d {
            for k in 0..d {
                mult[i][j][k] = h.comult[k][i][j].clone();
                comult[k][i][j] = h.mult[i][j][k].clone();
            }
        }
    }
    HopfData {
        field: h.field.clone(),
        dim: d,
        mult,
        unit: h.counit.clone(),
        comult,
        counit: h.unit.clone(),
        antipode: h.antipode.transpose(),
        gens: (0..d).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> Field {
        Field::Rational
    }

    #[test]
    fn group_algebra_c2() {
        let h = build_group_algebra(&cyclic_table(2), q()).unwrap();
        assert_eq!(h.dim, 2);
        assert!(h.antipode.is_identity()); // g^{-1} = g
        let report = verify_hopf(&h).unwrap();
        assert!(report.all_pass(), "failing axioms: {:?}", report.failing());

        let f2 = Field::prime(2).unwrap();
        let h2 = build_group_algebra(&cyclic_table(2), f2.clone()).unwrap();
        assert_eq!(h2.counit, vec![f2.one(), f2.one()]);
        assert!(verify_hopf(&h2).unwrap().all_pass());
    }

    #[test]
    fn not_a_group() {
        // No identity.
        let table = vec![vec![1, 0], vec![0, 0]];
        match build_group_algebra(&table, q()) {
            Err(Error::NotAGroup(_)) => {}
            other => panic!("expected NotAGroup, got {other:?}"),
        }
    }

    #[test]
    fn sweedler_axioms_and_antipode() {
        let h = build_sweedler(q()).unwrap();
        assert_eq!(h.dim, 4);
        let report = verify_hopf(&h).unwrap();
        assert!(report.all_pass(), "failing axioms: {:?}", report.failing());

        // S^2 is conjugation by g: diag(1, 1, -1, -1) in the {1,g,x,gx} basis.
        let s2 = antipode_power(&h, 2).unwrap();
        let expected = Matrix::from_i64(
            &q(),
            &[&[1, 0, 0, 0], &[0, 1, 0, 0], &[0, 0, -1, 0], &[0, 0, 0, -1]],
        );
        assert_eq!(s2, expected);
        assert!(!s2.is_identity());
        assert!(antipode_power(&h, 4).unwrap().is_identity());
    }

    #[test]
    fn corrupted_sweedler_fails_coassociativity() {
        let mut h = build_sweedler(q()).unwrap();
        // Corrupt Delta(x) from x(x)1 + g(x)x to x(x)1 - g(x)x.
        h.comult[2][1][2] = h.comult[2][1][2].neg();
        let report = verify_hopf(&h).unwrap();
        let coassoc = report
            .axioms
            .iter()
            .find(|a| a.name == "coassociativity")
            .unwrap();
        assert!(!coassoc.pass);
        assert!(coassoc.witness.is_some());
    }

    #[test]
    fn single_constant_corruptions_are_detected() {
        let h = build_sweedler(q()).unwrap();
        // Flip one structure constant at a time and confirm some axiom fails.
        let mut corrupted = h.clone();
        corrupted.mult[1][1][0] = q().from_i64(2);
        assert!(!verify_hopf(&corrupted).unwrap().all_pass());

        let mut corrupted = h.clone();
        corrupted.counit[1] = q().zero();
        assert!(!verify_hopf(&corrupted).unwrap().all_pass());

        let mut corrupted = h.clone();
        corrupted.antipode.set(0, 0, q().from_i64(-1));
        assert!(!verify_hopf(&corrupted).unwrap().all_pass());
    }

    #[test]
    fn taft2_equals_sweedler() {
        let t = build_taft(2, q()).unwrap();
        let s = build_sweedler(q()).unwrap();
        assert!(t.structure_eq(&s));
    }

    #[test]
    fn taft3_needs_a_cube_root() {
        match build_taft(3, q()) {
            Err(Error::BadRoot { n: 3, .. }) => {}
            other => panic!("expected BadRoot, got {other:?}"),
        }
        let c3 = Field::cyclotomic(3).unwrap();
        let t = build_taft(3, c3).unwrap();
        assert_eq!(t.dim, 9);
        let report = verify_hopf(&t).unwrap();
        assert!(report.all_pass(), "failing axioms: {:?}", report.failing());
    }

    #[test]
    fn integrals_and_semisimplicity() {
        let h = build_group_algebra(&cyclic_table(2), q()).unwrap();
        let ints = integral_space(&h, IntegralSide::Left);
        assert_eq!(ints.len(), 1);
        // Lambda = 1 + g up to scaling.
        let l = &ints[0];
        assert_eq!(l[0], l[1]);
        assert!(!l[0].is_zero());
        assert!(is_semisimple(&h).unwrap());

        let f2 = Field::prime(2).unwrap();
        let h2 = build_group_algebra(&cyclic_table(2), f2).unwrap();
        let ints = integral_space(&h2, IntegralSide::Left);
        assert_eq!(ints.len(), 1);
        assert!(!is_semisimple(&h2).unwrap());

        let sw = build_sweedler(q()).unwrap();
        let ints = integral_space(&sw, IntegralSide::Left);
        assert_eq!(ints.len(), 1);
        assert!(!is_semisimple(&sw).unwrap());
    }

    #[test]
    fn dualize_involutive_and_valid() {
        let h = build_sweedler(q()).unwrap();
        let dual = dualize(&h);
        assert!(verify_hopf(&dual).unwrap().all_pass());
        assert!(dualize(&dual).structure_eq(&h));

        let g = build_group_algebra(&cyclic_table(2), q()).unwrap();
        let gd = dualize(&g);
        assert!(verify_hopf(&gd).unwrap().all_pass());
        assert!(dualize(&gd).structure_eq(&g));
    }

    #[test]
    fn hopf_json_round_trip() {
        let h = build_sweedler(q()).unwrap();
        let json = h.to_canonical_json();
        let back: HopfData = serde_json::from_str(&json).unwrap();
        let back = back.normalize().unwrap();
        assert!(back.structure_eq(&h));
        assert_eq!(back.gens, vec![0, 1, 2, 3]);
    }
}
