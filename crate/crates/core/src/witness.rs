//! The blockwise witness pipeline: truncated block layouts on U (x) V, shaped
//! operators whose cells follow the alternating even/odd patterns, the exact
//! recursion step f -> (f^{-1})^flat performed cellwise, the open-condition
//! checks on the level-0 operator, slice-algebra saturation, and the final
//! machine-checkable certificate with an independent recheck path.

use std::collections::HashMap;

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::coend::{coend, is_intertwiner, EndoOnTensor, Parity};
use crate::error::{Error, Result};
use crate::field::{Field, Scalar};
use crate::hopf::is_semisimple;
use crate::matrix::Matrix;
use crate::rep::{
    hom_space, is_free, is_projective, random_combination, FreenessVerdict, HopfRef,
    Projectivity, Rep, Side,
};

pub const DEFAULT_CELL_REDRAWS: usize = 64;
pub const DEFAULT_SLICE_BUDGET: usize = 64;

/// Truncated block layout: U = (+)_{i<=M} U^0_i (+) (+)_{i<=M} U^1_i with
/// U^0_0 the regular module and every other block trivial; V = V_0 (+) V_1
/// with V_0 regular and V_1 trivial.
#[derive(Debug, Clone)]
pub struct BlockLayout {
    pub hopf: HopfRef,
    pub v0_dim: usize,
    pub v1_dim: usize,
    pub truncation: usize,
}

pub fn make_layout(hopf: &HopfRef, v1_dim: usize, truncation: usize) -> Result<BlockLayout> {
    if truncation == 0 {
        return Err(Error::InvalidLayout(
            "truncation 0 leaves no shift cells".into(),
        ));
    }
    if v1_dim == 0 {
        return Err(Error::InvalidLayout("the trivial summand V_1 must be nonzero".into()));
    }
    Ok(BlockLayout {
        hopf: hopf.clone(),
        v0_dim: hopf.dim,
        v1_dim,
        truncation,
    })
}

impl BlockLayout {
    pub fn field(&self) -> &Field {
        &self.hopf.field
    }

    pub fn u_dim(&self, layer: u8) -> usize {
        match layer {
            0 => self.hopf.dim,
            _ => self.v1_dim,
        }
    }

    pub fn v_dim(&self, v: VFactor) -> usize {
        match v {
            VFactor::V0 => self.v0_dim,
            VFactor::V1 => self.v1_dim,
        }
    }

    pub fn v_total(&self) -> usize {
        self.v0_dim + self.v1_dim
    }

    pub fn diag_cell_dim(&self) -> usize {
        self.hopf.dim * self.v0_dim + self.v1_dim * self.v1_dim
    }

    pub fn shift_cell_dim(&self) -> usize {
        self.v1_dim * self.v0_dim + self.hopf.dim * self.v1_dim
    }

    pub fn head_cell_dim(&self) -> usize {
        self.hopf.dim * self.v1_dim
    }

    /// The full V module V_0 (+) V_1 as a left module.
    pub fn v_module(&self) -> Rep {
        Rep::regular(&self.hopf, Side::Left)
            .direct_sum(&Rep::trivial(&self.hopf, self.v1_dim, Side::Left))
            .expect("same Hopf data")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum VFactor {
    V0,
    V1,
}

/// One tensor block U^layer_index (x) V_v (or (x) V_v* at odd levels).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TBlock {
    pub layer: u8,
    pub index: usize,
    pub v: VFactor,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CellId {
    Diag(usize),
    Head,
    Shift(usize),
}

impl std::fmt::Display for CellId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CellId::Diag(i) => write!(f, "D{i}"),
            CellId::Head => write!(f, "H"),
            CellId::Shift(i) => write!(f, "W{i}"),
        }
    }
}

/// Source and target block lists of a cell, in the fixed internal order.
/// Even levels follow the pattern of operators U_{S^n} (x) V -> U_triv (x) V;
/// odd levels the reversed pattern on U (x) V*.
pub fn cell_blocks(parity: Parity, id: CellId) -> (Vec<TBlock>, Vec<TBlock>) {
    let b = |layer: u8, index: usize, v: VFactor| TBlock { layer, index, v };
    match (parity, id) {
        (_, CellId::Diag(i)) => {
            let blocks = vec![b(0, i, VFactor::V0), b(1, i, VFactor::V1)];
            (blocks.clone(), blocks)
        }
        (Parity::Even, CellId::Head) => (vec![b(0, 0, VFactor::V1)], vec![b(1, 0, VFactor::V0)]),
        (Parity::Odd, CellId::Head) => (vec![b(1, 0, VFactor::V0)], vec![b(0, 0, VFactor::V1)]),
        (Parity::Even, CellId::Shift(i)) => (
            vec![b(1, i - 1, VFactor::V0), b(0, i, VFactor::V1)],
            vec![b(1, i, VFactor::V0), b(0, i - 1, VFactor::V1)],
        ),
        (Parity::Odd, CellId::Shift(i)) => (
            vec![b(1, i, VFactor::V0), b(0, i - 1, VFactor::V1)],
            vec![b(1, i - 1, VFactor::V0), b(0, i, VFactor::V1)],
        ),
    }
}

/// A block operator respecting the cell pattern of its level: diagonal cells
/// D_0..D_diag_max, the head cell, and shift cells W_1..W_shift_max. Each
/// cell is a self-contained square matrix, so truncation loses no exactness.
#[derive(Debug, Clone, PartialEq)]
pub struct ShapedOperator {
    pub layout: BlockLayout,
    pub level: usize,
    pub diag: Vec<Matrix>,
    pub head: Matrix,
    pub shift: Vec<Matrix>,
}

impl PartialEq for BlockLayout {
    fn eq(&self, other: &Self) -> bool {
        self.hopf.structure_eq(&other.hopf)
            && self.v0_dim == other.v0_dim
            && self.v1_dim == other.v1_dim
            && self.truncation == other.truncation
    }
}

impl ShapedOperator {
    pub fn parity(&self) -> Parity {
        Parity::of(self.level as i64)
    }

    pub fn diag_max(&self) -> usize {
        self.diag.len() - 1
    }

    pub fn shift_max(&self) -> usize {
        self.shift.len()
    }

    pub fn cell_ids(&self) -> Vec<CellId> {
        let mut ids = Vec::with_capacity(self.diag.len() + self.shift.len() + 1);
        for i in 0..self.diag.len() {
            ids.push(CellId::Diag(i));
        }
        ids.push(CellId::Head);
        for i in 1..=self.shift.len() {
            ids.push(CellId::Shift(i));
        }
        ids
    }

    pub fn cell(&self, id: CellId) -> &Matrix {
        match id {
            CellId::Diag(i) => &self.diag[i],
            CellId::Head => &self.head,
            CellId::Shift(i) => &self.shift[i - 1],
        }
    }

    fn cell_mut(&mut self, id: CellId) -> &mut Matrix {
        match id {
            CellId::Diag(i) => &mut self.diag[i],
            CellId::Head => &mut self.head,
            CellId::Shift(i) => &mut self.shift[i - 1],
        }
    }

    pub fn all_cells_invertible(&self) -> bool {
        self.cell_ids().iter().all(|&id| self.cell(id).is_invertible())
    }

    /// Structural shape check: every cell square of the size its block list
    /// demands, with the cell inventory matching the level's pattern.
    pub fn check_shape(&self) -> bool {
        if self.diag.is_empty() {
            return false;
        }
        for id in self.cell_ids() {
            let (src, tgt) = cell_blocks(self.parity(), id);
            let sdim: usize = src.iter().map(|b| block_dim(&self.layout, *b)).sum();
            let tdim: usize = tgt.iter().map(|b| block_dim(&self.layout, *b)).sum();
            let m = self.cell(id);
            if m.rows() != tdim || m.cols() != sdim {
                return false;
            }
        }
        true
    }
}

pub fn block_dim(layout: &BlockLayout, b: TBlock) -> usize {
    layout.u_dim(b.layer) * layout.v_dim(b.v)
}

fn block_offsets(layout: &BlockLayout, blocks: &[TBlock]) -> Vec<usize> {
    let mut off = Vec::with_capacity(blocks.len() + 1);
    let mut acc = 0;
    for b in blocks {
        off.push(acc);
        acc += block_dim(layout, *b);
    }
    off.push(acc);
    off
}

/// Extracts the sub-block (target block ti, source block si) of a cell.
fn extract_sub(
    layout: &BlockLayout,
    cell: &Matrix,
    tgt: &[TBlock],
    src: &[TBlock],
    ti: usize,
    si: usize,
) -> Matrix {
    let toff = block_offsets(layout, tgt);
    let soff = block_offsets(layout, src);
    cell.submatrix(
        toff[ti],
        toff[ti + 1] - toff[ti],
        soff[si],
        soff[si + 1] - soff[si],
    )
}

/// The halfdual of one sub-block: a map U_a (x) V_b -> U_c (x) V_d becomes
/// a map U_a (x) V_d -> U_c (x) V_b with entries
/// T[(c,b),(a,d)] = S[(c,d),(a,b)] (u-major within blocks).
fn flat_sub(layout: &BlockLayout, sub: &Matrix, tgt: TBlock, src: TBlock) -> (TBlock, TBlock, Matrix) {
    let uc = layout.u_dim(tgt.layer);
    let vd = layout.v_dim(tgt.v);
    let ua = layout.u_dim(src.layer);
    let vb = layout.v_dim(src.v);
    debug_assert_eq!(sub.rows(), uc * vd);
    debug_assert_eq!(sub.cols(), ua * vb);
    let new_tgt = TBlock {
        layer: tgt.layer,
        index: tgt.index,
        v: src.v,
    };
    let new_src = TBlock {
        layer: src.layer,
        index: src.index,
        v: tgt.v,
    };
    let out = Matrix::from_fn(sub.field().clone(), uc * vb, ua * vd, |r, col| {
        let (c, b) = (r / vb, r % vb);
        let (a, d) = (col / vd, col % vd);
        sub.get(c * vd + d, a * vb + b).clone()
    });
    (new_tgt, new_src, out)
}

type SubMap = HashMap<(TBlock, TBlock), Matrix>;

/// Sub-blocks of the cellwise inverse, keyed by (target, source) block of
/// the inverse (source and target roles swapped against the original).
fn inverse_subblock_map(op: &ShapedOperator) -> Result<SubMap> {
    let mut map = SubMap::new();
    for id in op.cell_ids() {
        let (src, tgt) = cell_blocks(op.parity(), id);
        let inv = op
            .cell(id)
            .inverse()
            .map_err(|_| Error::CellSingular(format!("{id} at level {}", op.level)))?;
        // For the inverse, the original target blocks become sources.
        for (ti, tb) in src.iter().enumerate() {
            for (si, sb) in tgt.iter().enumerate() {
                let sub = extract_sub(&op.layout, &inv, &src, &tgt, ti, si);
                map.insert((*tb, *sb), sub);
            }
        }
    }
    Ok(map)
}

fn flat_map(layout: &BlockLayout, map: &SubMap) -> SubMap {
    let mut out = SubMap::new();
    for ((tgt, src), sub) in map {
        let (nt, ns, m) = flat_sub(layout, sub, *tgt, *src);
        out.insert((nt, ns), m);
    }
    out
}

fn assemble(
    layout: &BlockLayout,
    level: usize,
    diag_max: usize,
    shift_max: usize,
    map: &SubMap,
) -> ShapedOperator {
    let parity = Parity::of(level as i64);
    let field = layout.field().clone();
    let build_cell = |id: CellId| -> Matrix {
        let (src, tgt) = cell_blocks(parity, id);
        let toff = block_offsets(layout, &tgt);
        let soff = block_offsets(layout, &src);
        let mut cell = Matrix::zero(field.clone(), toff[tgt.len()], soff[src.len()]);
        for (ti, tb) in tgt.iter().enumerate() {
            for (si, sb) in src.iter().enumerate() {
                let sub = map.get(&(*tb, *sb)).unwrap_or_else(|| {
                    panic!("missing sub-block for cell {id} at level {level}: target {tb:?} source {sb:?}")
                });
                cell.set_block(toff[ti], soff[si], sub);
            }
        }
        cell
    };
    let diag = (0..=diag_max).map(|i| build_cell(CellId::Diag(i))).collect();
    let head = build_cell(CellId::Head);
    let shift = (1..=shift_max).map(|i| build_cell(CellId::Shift(i))).collect();
    ShapedOperator {
        layout: layout.clone(),
        level,
        diag,
        head,
        shift,
    }
}

/// One recursion step: invert every cell, apply the halfdual blockwise, and
/// reassemble in the pattern of the next level. Cells are self-contained, so
/// the step is exact; the pattern consumes one shift index at the diagonal
/// boundary (and one diagonal index at the shift boundary).
pub fn advance(op: &ShapedOperator) -> Result<ShapedOperator> {
    let d_max = op.diag_max();
    let s_max = op.shift_max();
    if s_max == 0 || d_max == 0 {
        return Err(Error::InvalidLayout(format!(
            "level {} operator has no room left to advance (diag_max {d_max}, shift_max {s_max})",
            op.level
        )));
    }
    let inv = inverse_subblock_map(op)?;
    let flat = flat_map(&op.layout, &inv);
    let new_d = d_max.min(s_max - 1);
    let new_s = s_max.min(d_max);
    Ok(assemble(&op.layout, op.level + 1, new_d, new_s, &flat))
}

/// Exact cellwise verification of halfdual(next) = prev^{-1}: every
/// sub-block of `next`, partially transposed on the V leg, must coincide
/// with the corresponding sub-block of the cellwise inverse of `prev`.
pub fn check_recursion_exact(prev: &ShapedOperator, next: &ShapedOperator) -> bool {
    if next.level != prev.level + 1 {
        return false;
    }
    let Ok(inv) = inverse_subblock_map(prev) else {
        return false;
    };
    for id in next.cell_ids() {
        let (src, tgt) = cell_blocks(next.parity(), id);
        let m = next.cell(id);
        for (ti, tb) in tgt.iter().enumerate() {
            for (si, sb) in src.iter().enumerate() {
                let sub = extract_sub(&next.layout, m, &tgt, &src, ti, si);
                let (nt, ns, flipped) = flat_sub(&next.layout, &sub, *tb, *sb);
                match inv.get(&(nt, ns)) {
                    Some(expected) if *expected == flipped => {}
                    _ => return false,
                }
            }
        }
    }
    true
}

// ---- module structures carried by the blocks at a given level ----

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
enum URole {
    Source,
    Target,
}

fn u_block_rep(layout: &BlockLayout, level: usize, b: TBlock, role: URole) -> Rep {
    let h = &layout.hopf;
    let n = level as i64;
    let dim = layout.u_dim(b.layer);
    let special = b.layer == 0 && b.index == 0;
    match (Parity::of(n), role) {
        (Parity::Even, URole::Source) => {
            if special {
                Rep::regular(h, Side::Left).twist(n).expect("n >= 0")
            } else {
                Rep::trivial(h, dim, Side::Left)
            }
        }
        (Parity::Even, URole::Target) => Rep::trivial(h, dim, Side::Left),
        (Parity::Odd, URole::Source) => Rep::trivial(h, dim, Side::Right),
        (Parity::Odd, URole::Target) => {
            if special {
                Rep::regular(h, Side::Left).twist(n).expect("n >= 0")
            } else {
                Rep::trivial(h, dim, Side::Right)
            }
        }
    }
}

fn v_factor_rep(layout: &BlockLayout, parity: Parity, v: VFactor) -> Rep {
    let h = &layout.hopf;
    match (parity, v) {
        (Parity::Even, VFactor::V0) => Rep::regular(h, Side::Left),
        (Parity::Even, VFactor::V1) => Rep::trivial(h, layout.v1_dim, Side::Left),
        (Parity::Odd, VFactor::V0) => Rep::regular(h, Side::Left).dual(),
        (Parity::Odd, VFactor::V1) => Rep::trivial(h, layout.v1_dim, Side::Right),
    }
}

struct LevelReps {
    cache: HashMap<(bool, u8, VFactor, bool), Rep>,
}

impl LevelReps {
    fn new() -> LevelReps {
        LevelReps {
            cache: HashMap::new(),
        }
    }

    fn tensor_rep(
        &mut self,
        layout: &BlockLayout,
        level: usize,
        b: TBlock,
        role: URole,
    ) -> Rep {
        let special = b.layer == 0 && b.index == 0;
        let key = (special, b.layer, b.v, role == URole::Source);
        if let Some(r) = self.cache.get(&key) {
            return r.clone();
        }
        let u = u_block_rep(layout, level, b, role);
        let v = v_factor_rep(layout, Parity::of(level as i64), b.v);
        let t = u.tensor(&v).expect("same Hopf data and side");
        self.cache.insert(key, t.clone());
        t
    }

    fn cell_reps(
        &mut self,
        layout: &BlockLayout,
        level: usize,
        id: CellId,
    ) -> (Rep, Rep) {
        let (src, tgt) = cell_blocks(Parity::of(level as i64), id);
        let fold = |reps: Vec<Rep>| -> Rep {
            let mut it = reps.into_iter();
            let first = it.next().expect("cells are nonempty");
            it.fold(first, |acc, r| acc.direct_sum(&r).expect("same side"))
        };
        let src_rep = fold(
            src.iter()
                .map(|b| self.tensor_rep(layout, level, *b, URole::Source))
                .collect(),
        );
        let tgt_rep = fold(
            tgt.iter()
                .map(|b| self.tensor_rep(layout, level, *b, URole::Target))
                .collect(),
        );
        (src_rep, tgt_rep)
    }
}

/// Every cell must intertwine the twisted module structures of its level.
pub fn check_level_conditions(op: &ShapedOperator) -> bool {
    let mut reps = LevelReps::new();
    for id in op.cell_ids() {
        let (src, tgt) = reps.cell_reps(&op.layout, op.level, id);
        if !is_intertwiner(op.cell(id), &src, &tgt) {
            return false;
        }
    }
    true
}

// ---- dense embedding of the truncated operator ----

/// Index bookkeeping for the dense embedding on
/// (U^0_0 (+) U^1_0 (+) U^0_1 (+) ...) (x) (V_0 (+) V_1).
#[derive(Debug, Clone)]
pub struct DenseIndex {
    pub max_index: usize,
    pub da: usize,
    pub v1: usize,
    pub v0: usize,
}

impl DenseIndex {
    pub fn u_offset(&self, layer: u8, index: usize) -> usize {
        index * (self.da + self.v1) + if layer == 0 { 0 } else { self.da }
    }

    pub fn u_total(&self) -> usize {
        (self.max_index + 1) * (self.da + self.v1)
    }

    pub fn v_offset(&self, v: VFactor) -> usize {
        match v {
            VFactor::V0 => 0,
            VFactor::V1 => self.v0,
        }
    }

    pub fn v_total(&self) -> usize {
        self.v0 + self.v1
    }

    pub fn u_block_of(&self, u_global: usize) -> (u8, usize, usize) {
        let group = self.da + self.v1;
        let index = u_global / group;
        let rem = u_global % group;
        if rem < self.da {
            (0, index, rem)
        } else {
            (1, index, rem - self.da)
        }
    }

    pub fn v_factor_of(&self, v_global: usize) -> (VFactor, usize) {
        if v_global < self.v0 {
            (VFactor::V0, v_global)
        } else {
            (VFactor::V1, v_global - self.v0)
        }
    }
}

/// The dense matrix of the operator on its materialized blocks, as an
/// operator on U_trunc (x) V (or (x) V* at odd levels) with the U index
/// major. Blocks not covered by a materialized cell are zero.
pub fn to_dense(op: &ShapedOperator) -> (EndoOnTensor, DenseIndex) {
    let layout = &op.layout;
    let idx = DenseIndex {
        max_index: op.diag_max().max(op.shift_max()),
        da: layout.hopf.dim,
        v1: layout.v1_dim,
        v0: layout.v0_dim,
    };
    let n = idx.u_total() * idx.v_total();
    let mut m = Matrix::zero(layout.field().clone(), n, n);
    let vt = idx.v_total();
    for id in op.cell_ids() {
        let (src, tgt) = cell_blocks(op.parity(), id);
        let cell = op.cell(id);
        let toff = block_offsets(layout, &tgt);
        let soff = block_offsets(layout, &src);
        for (ti, tb) in tgt.iter().enumerate() {
            let vd = layout.v_dim(tb.v);
            for (si, sb) in src.iter().enumerate() {
                let vb = layout.v_dim(sb.v);
                for r in 0..(toff[ti + 1] - toff[ti]) {
                    let (c, d) = (r / vd, r % vd);
                    let gr = (idx.u_offset(tb.layer, tb.index) + c) * vt
                        + idx.v_offset(tb.v)
                        + d;
                    for s in 0..(soff[si + 1] - soff[si]) {
                        let e = cell.get(toff[ti] + r, soff[si] + s);
                        if e.is_zero() {
                            continue;
                        }
                        let (a, b) = (s / vb, s % vb);
                        let gc = (idx.u_offset(sb.layer, sb.index) + a) * vt
                            + idx.v_offset(sb.v)
                            + b;
                        m.set(gr, gc, e.clone());
                    }
                }
            }
        }
    }
    let endo = EndoOnTensor {
        u_dim: idx.u_total(),
        v_dim: vt,
        parity: op.parity(),
        matrix: m,
    };
    (endo, idx)
}

/// The truncated U module underlying a dense embedding: regular on U^0_0,
/// trivial elsewhere, as a plain (untwisted) left module.
pub fn dense_u_module(layout: &BlockLayout, idx: &DenseIndex) -> Rep {
    let h = &layout.hopf;
    let mut rep = Rep::regular(h, Side::Left)
        .direct_sum(&Rep::trivial(h, layout.v1_dim, Side::Left))
        .expect("same Hopf data");
    for _ in 1..=idx.max_index {
        rep = rep
            .direct_sum(&Rep::trivial(h, h.dim + layout.v1_dim, Side::Left))
            .expect("same Hopf data");
    }
    rep
}

/// True iff the dense matrix vanishes outside the declared cell pattern.
pub fn check_shape_dense(
    dense: &Matrix,
    op: &ShapedOperator,
    idx: &DenseIndex,
) -> bool {
    let mut allowed: std::collections::HashSet<(u8, usize, VFactor, u8, usize, VFactor)> =
        std::collections::HashSet::new();
    for id in op.cell_ids() {
        let (src, tgt) = cell_blocks(op.parity(), id);
        for tb in &tgt {
            for sb in &src {
                allowed.insert((tb.layer, tb.index, tb.v, sb.layer, sb.index, sb.v));
            }
        }
    }
    let vt = idx.v_total();
    for r in 0..dense.rows() {
        let (tl, tidx, _) = idx.u_block_of(r / vt);
        let (tv, _) = idx.v_factor_of(r % vt);
        for c in 0..dense.cols() {
            if dense.get(r, c).is_zero() {
                continue;
            }
            let (sl, sidx, _) = idx.u_block_of(c / vt);
            let (sv, _) = idx.v_factor_of(c % vt);
            if !allowed.contains(&(tl, tidx, tv, sl, sidx, sv)) {
                return false;
            }
        }
    }
    true
}

// ---- sampling ----

#[derive(Debug, Default, Clone, Copy)]
pub struct SamplerStats {
    pub cell_redraws: usize,
}

/// Level-0 cell sampler. Hom-space bases are solved once per structural cell
/// kind (D_0, generic D_i, head, generic W_i) and reused across cells and
/// redraws.
pub struct CellSampler {
    layout: BlockLayout,
    diag0: Vec<Matrix>,
    diag: Vec<Matrix>,
    head: Vec<Matrix>,
    shift: Vec<Matrix>,
}

impl CellSampler {
    pub fn new(layout: &BlockLayout) -> Result<CellSampler> {
        let mut reps = LevelReps::new();
        let basis_for = |reps: &mut LevelReps, id: CellId| -> Result<Vec<Matrix>> {
            let (src, tgt) = reps.cell_reps(layout, 0, id);
            hom_space(&src, &tgt)
        };
        Ok(CellSampler {
            layout: layout.clone(),
            diag0: basis_for(&mut reps, CellId::Diag(0))?,
            diag: basis_for(&mut reps, CellId::Diag(1))?,
            head: basis_for(&mut reps, CellId::Head)?,
            shift: basis_for(&mut reps, CellId::Shift(1))?,
        })
    }

    fn basis(&self, id: CellId) -> &[Matrix] {
        match id {
            CellId::Diag(0) => &self.diag0,
            CellId::Diag(_) => &self.diag,
            CellId::Head => &self.head,
            CellId::Shift(_) => &self.shift,
        }
    }

    /// Draws every cell as a random integer combination of its Hom-space
    /// basis, redrawing per cell until invertible.
    pub fn sample(
        &self,
        rng: &mut ChaCha20Rng,
        bound: i64,
        stats: &mut SamplerStats,
    ) -> Result<ShapedOperator> {
        let m = self.layout.truncation;
        let mut op = ShapedOperator {
            layout: self.layout.clone(),
            level: 0,
            diag: vec![Matrix::zero(self.layout.field().clone(), 0, 0); m + 1],
            head: Matrix::zero(self.layout.field().clone(), 0, 0),
            shift: vec![Matrix::zero(self.layout.field().clone(), 0, 0); m],
        };
        let mut ids = vec![];
        for i in 0..=m {
            ids.push(CellId::Diag(i));
        }
        ids.push(CellId::Head);
        for i in 1..=m {
            ids.push(CellId::Shift(i));
        }
        for id in ids {
            let basis = self.basis(id);
            let (src, tgt) = cell_blocks(Parity::Even, id);
            let rows: usize = tgt.iter().map(|b| block_dim(&self.layout, *b)).sum();
            let cols: usize = src.iter().map(|b| block_dim(&self.layout, *b)).sum();
            let mut found = false;
            for attempt in 0..DEFAULT_CELL_REDRAWS {
                let cand =
                    random_combination(basis, rows, cols, bound, rng, &self.layout.hopf);
                if cand.is_invertible() {
                    *op.cell_mut(id) = cand;
                    found = true;
                    stats.cell_redraws += attempt;
                    break;
                }
            }
            if !found {
                stats.cell_redraws += DEFAULT_CELL_REDRAWS;
                return Err(Error::SamplingExhausted {
                    cell: id.to_string(),
                    attempts: DEFAULT_CELL_REDRAWS,
                });
            }
        }
        Ok(op)
    }
}

/// Samples a level-0 shaped operator with all cells invertible.
pub fn sample_x0(layout: &BlockLayout, seed: u64, bound: i64) -> Result<ShapedOperator> {
    let sampler = CellSampler::new(layout)?;
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut stats = SamplerStats::default();
    sampler.sample(&mut rng, bound, &mut stats)
}

// ---- open conditions ----

/// The three projections of the level-0 operator: the U_0 (x) V_0 diagonal
/// component, the head cell, and the W_1 component U^1_0 (x) V_0 ->
/// U_0 (x) V_1 composed with the first dual-basis functional on U_0.
pub fn check_o123(f0: &ShapedOperator) -> Result<(bool, bool, bool)> {
    if f0.level != 0 {
        return Err(Error::ShapeMismatch(
            "open conditions are defined on the level-0 operator".into(),
        ));
    }
    let layout = &f0.layout;
    let (src, tgt) = cell_blocks(Parity::Even, CellId::Diag(0));
    let pi1 = extract_sub(layout, &f0.diag[0], &tgt, &src, 0, 0);
    let o1 = pi1.is_invertible();
    let o2 = f0.head.is_invertible();
    // W_1: source block 0 = U^1_0 (x) V_0, target block 1 = U^0_0 (x) V_1.
    let (wsrc, wtgt) = cell_blocks(Parity::Even, CellId::Shift(1));
    let sub = extract_sub(layout, &f0.shift[0], &wtgt, &wsrc, 1, 0);
    // Compose with (first dual-basis functional on U_0) (x) id: keep the
    // rows with U-part index 0.
    let pi3 = sub.submatrix(0, layout.v1_dim, 0, sub.cols());
    let o3 = pi3.rank() == layout.v1_dim;
    Ok((o1, o2, o3))
}

/// The pi_1 component as a standalone operator on U_0 (x) V_0.
pub fn pi1_operator(f0: &ShapedOperator) -> Result<EndoOnTensor> {
    let layout = &f0.layout;
    let (src, tgt) = cell_blocks(Parity::Even, CellId::Diag(0));
    let pi1 = extract_sub(layout, &f0.diag[0], &tgt, &src, 0, 0);
    EndoOnTensor::new(layout.hopf.dim, layout.v0_dim, Parity::Even, pi1)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SliceAlgebraRecord {
    pub dim: usize,
    pub saturated: bool,
    pub budget_exhausted: bool,
    pub multiplications: usize,
}

struct SpanBasis {
    dim: usize,
    rows: Vec<Vec<Scalar>>,
    pivots: Vec<usize>,
}

impl SpanBasis {
    fn new(dim: usize) -> SpanBasis {
        SpanBasis {
            dim,
            rows: vec![],
            pivots: vec![],
        }
    }

    fn insert(&mut self, mut v: Vec<Scalar>) -> bool {
        debug_assert_eq!(v.len(), self.dim);
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            if !v[p].is_zero() {
                let c = v[p].clone();
                for (x, y) in v.iter_mut().zip(row) {
                    if !y.is_zero() {
                        *x = x.sub(&c.mul(y));
                    }
                }
            }
        }
        let Some(p) = v.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        let inv = v[p].inv().expect("nonzero pivot");
        for x in v.iter_mut() {
            if !x.is_zero() {
                *x = x.mul(&inv);
            }
        }
        self.rows.push(v);
        self.pivots.push(p);
        true
    }

    fn len(&self) -> usize {
        self.rows.len()
    }
}

/// Generates the subalgebra of End V spanned by the V-slices of an operator
/// on U (x) V, closing the span under multiplication breadth-first until it
/// stabilizes, saturates to all of End V, or the multiplication budget runs
/// out. Saturation certifies that no proper nonzero subspace of V is
/// invariant under the operator.
pub fn slice_algebra(f: &EndoOnTensor, budget: usize) -> SliceAlgebraRecord {
    let v2 = f.v_dim * f.v_dim;
    let mut span = SpanBasis::new(v2);
    let mut mats: Vec<Matrix> = Vec::new();
    for u in 0..f.u_dim {
        for u2 in 0..f.u_dim {
            let s = f.slice(u, u2);
            if s.is_zero() {
                continue;
            }
            if span.insert(s.entries().to_vec()) {
                mats.push(s);
            }
            if span.len() == v2 {
                return SliceAlgebraRecord {
                    dim: v2,
                    saturated: true,
                    budget_exhausted: false,
                    multiplications: 0,
                };
            }
        }
    }
    let mut mults = 0;
    let mut i = 0;
    while i < mats.len() {
        let mut j = 0;
        while j <= i {
            let pairs: &[(usize, usize)] = if i == j { &[(i, i)] } else { &[(i, j), (j, i)] };
            for &(a, b) in pairs {
                if mults >= budget {
                    return SliceAlgebraRecord {
                        dim: span.len(),
                        saturated: false,
                        budget_exhausted: true,
                        multiplications: mults,
                    };
                }
                mults += 1;
                let p = mats[a].mul(&mats[b]);
                if span.insert(p.entries().to_vec()) {
                    mats.push(p);
                    if span.len() == v2 {
                        return SliceAlgebraRecord {
                            dim: v2,
                            saturated: true,
                            budget_exhausted: false,
                            multiplications: mults,
                        };
                    }
                }
            }
            j += 1;
        }
        i += 1;
    }
    SliceAlgebraRecord {
        dim: span.len(),
        saturated: span.len() == v2,
        budget_exhausted: false,
        multiplications: mults,
    }
}

/// O4 = O1 and O2 and O3 together with slice-algebra saturation of pi_1.
pub fn check_o4(f0: &ShapedOperator, budget: usize) -> Result<(Verdict, SliceAlgebraRecord)> {
    let (o1, o2, o3) = check_o123(f0)?;
    let pi1 = pi1_operator(f0)?;
    let rec = slice_algebra(&pi1, budget);
    let verdict = if !(o1 && o2 && o3) {
        Verdict::Fail
    } else if rec.saturated {
        Verdict::Pass
    } else if rec.budget_exhausted {
        Verdict::Inconclusive
    } else {
        Verdict::Fail
    };
    Ok((verdict, rec))
}

/// The canonical A-linear operator A (x) A -> A_triv (x) A determined by
/// 1 (x) y -> y (x) 1, in closed form x (x) y -> sum S(x_2) y (x) x_1.
/// Its slice algebra saturates, and it has no nontrivial invariant subspace
/// on the second leg.
pub fn exchange_operator(hopf: &HopfRef) -> EndoOnTensor {
    let d = hopf.dim;
    let field = hopf.field.clone();
    let mut m = Matrix::zero(field, d * d, d * d);
    for i in 0..d {
        for j in 0..d {
            for b in 0..d {
                for q in 0..d {
                    let c = &hopf.comult[i][b][q];
                    if c.is_zero() {
                        continue;
                    }
                    for s in 0..d {
                        let sv = hopf.antipode.get(s, q);
                        if sv.is_zero() {
                            continue;
                        }
                        let csv = c.mul(sv);
                        for (a, mv) in hopf.mult[s][j].iter().enumerate() {
                            if mv.is_zero() {
                                continue;
                            }
                            let cur = m.get(a * d + b, i * d + j).add(&csv.mul(mv));
                            m.set(a * d + b, i * d + j, cur);
                        }
                    }
                }
            }
        }
    }
    EndoOnTensor {
        u_dim: d,
        v_dim: d,
        parity: Parity::Even,
        matrix: m,
    }
}

/// Exhaustively searches for a proper nonzero subspace N' of the V leg with
/// f(U (x) N') inside U (x) N'. Only prime fields F_2, F_3 with v_dim <= 3
/// are small enough to enumerate.
pub fn invariant_subspace_bruteforce(f: &EndoOnTensor) -> Result<Option<Matrix>> {
    let field = f.matrix.field().clone();
    let p = match field {
        Field::Prime(p) if p <= 3 => p,
        _ => {
            return Err(Error::TooLarge(
                "invariant-subspace enumeration requires F_2 or F_3".into(),
            ))
        }
    };
    let v = f.v_dim;
    if v > 3 {
        return Err(Error::TooLarge(format!(
            "invariant-subspace enumeration requires v_dim <= 3, got {v}"
        )));
    }
    let mut slices = Vec::new();
    for u in 0..f.u_dim {
        for u2 in 0..f.u_dim {
            let s = f.slice(u, u2);
            if !s.is_zero() {
                slices.push(s);
            }
        }
    }
    for d in 1..v {
        // Enumerate all d x v matrices over F_p, keep canonical RREF bases
        // of rank d, deduplicate, and test in deterministic order.
        let total = (p as u64).pow((d * v) as u32);
        let mut seen = std::collections::BTreeSet::new();
        for code in 0..total {
            let mut rows = Vec::with_capacity(d);
            let mut c = code;
            for _ in 0..d {
                let mut row = Vec::with_capacity(v);
                for _ in 0..v {
                    row.push(field.from_i64((c % p as u64) as i64));
                    c /= p as u64;
                }
                rows.push(row);
            }
            let mut rr = rows.clone();
            let pivots = crate::matrix::rref_in_place(&mut rr);
            if pivots.len() != d {
                continue;
            }
            let canon = Matrix::from_rows(field.clone(), rr[..d].to_vec());
            let key = format!("{canon:?}");
            if !seen.insert(key) {
                continue;
            }
            // Invariance: every slice must map the row space into itself.
            let mut invariant = true;
            'outer: for s in &slices {
                for r in 0..d {
                    let img = s.mul_vec(&canon.row(r));
                    // Membership in the row space via reduction against the
                    // RREF basis.
                    let mut vres = img;
                    for (br, &pc) in (0..d).zip(&pivots) {
                        if !vres[pc].is_zero() {
                            let c = vres[pc].clone();
                            for (x, y) in vres.iter_mut().zip(&canon.row(br)) {
                                if !y.is_zero() {
                                    *x = x.sub(&c.mul(y));
                                }
                            }
                        }
                    }
                    if vres.iter().any(|x| !x.is_zero()) {
                        invariant = false;
                        break 'outer;
                    }
                }
            }
            if invariant {
                return Ok(Some(canon));
            }
        }
    }
    Ok(None)
}

// ---- certificates ----

pub const CAVEAT_INSTANCE: &str = "checks are exact for this instance, seed and field; \
generic existence of witnesses at every depth is an argument over uncountable \
algebraically closed fields and is not re-proved by this run";
pub const CAVEAT_SLICE: &str = "slice-algebra saturation is a sufficient injectivity \
criterion stated over algebraically closed fields; over Q or a finite field it remains \
a valid per-instance certificate, while non-saturation decides nothing";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelRecord {
    pub n: usize,
    pub cells_invertible: bool,
    pub shape: bool,
    pub intertwiner: bool,
    /// halfdual(f_n) = f_{n-1}^{-1} verified cellwise; null at n = 0.
    pub recursion_exact: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OpenConditionsRecord {
    #[serde(rename = "O1")]
    pub o1: bool,
    #[serde(rename = "O2")]
    pub o2: bool,
    #[serde(rename = "O3")]
    pub o3: bool,
    #[serde(rename = "O4")]
    pub o4: Verdict,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct F0Cells {
    pub diag: Vec<Matrix>,
    pub head: Matrix,
    pub shift: Vec<Matrix>,
}

/// The machine-checkable record of a witness run. Every verdict field is
/// re-derivable from the stored level-0 cells, the configuration and the
/// input Hopf data; `recheck` does exactly that.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessCertificate {
    pub field: Field,
    pub input_hash: String,
    pub seed: u64,
    pub depth: usize,
    pub truncation: usize,
    pub v1_dim: usize,
    pub bound: i64,
    pub retries: usize,
    pub attempts: usize,
    pub cell_redraws: usize,
    pub levels: Vec<LevelRecord>,
    pub open_conditions: Option<OpenConditionsRecord>,
    pub slice_algebra: Option<SliceAlgebraRecord>,
    pub semisimple: Option<bool>,
    pub coend_projective: Option<bool>,
    pub coend_free: Option<String>,
    pub phi_faithful: Option<bool>,
    pub f0: Option<F0Cells>,
    pub diagnostic: Option<String>,
    pub verdict: Verdict,
    pub caveats: Vec<String>,
}

impl WitnessCertificate {
    pub fn to_canonical_json(&self) -> String {
        serde_json::to_string(self).expect("certificate serialization cannot fail")
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct WitnessParams {
    pub v1_dim: usize,
    pub depth: usize,
    pub truncation: usize,
    pub seed: u64,
    pub bound: i64,
    pub retries: usize,
}

impl Default for WitnessParams {
    fn default() -> Self {
        WitnessParams {
            v1_dim: 1,
            depth: 5,
            truncation: 8,
            seed: 0,
            bound: 3,
            retries: 50,
        }
    }
}

/// A successful witness: the full tower of shaped operators f_0 .. f_N.
#[derive(Debug, Clone)]
pub struct Witness {
    pub layout: BlockLayout,
    pub levels: Vec<ShapedOperator>,
}

pub struct WitnessOutcome {
    pub certificate: WitnessCertificate,
    pub witness: Option<Witness>,
}

pub fn input_hash(hopf: &HopfRef) -> String {
    let mut hasher = Sha256::new();
    hasher.update(hopf.to_canonical_json().as_bytes());
    format!("sha256:{}", hex_string(&hasher.finalize()))
}

fn hex_string(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

struct Derived {
    levels: Vec<LevelRecord>,
    open: OpenConditionsRecord,
    slice: SliceAlgebraRecord,
    ops: Vec<ShapedOperator>,
    ok: bool,
    inconclusive: bool,
}

/// Recomputes every per-level and open-condition verdict from a level-0
/// operator. Shared by the builder and the independent recheck path.
fn derive_from_f0(f0: &ShapedOperator, depth: usize) -> Result<Derived> {
    let (o1, o2, o3) = check_o123(f0)?;
    let (o4, slice) = check_o4(f0, DEFAULT_SLICE_BUDGET)?;
    let open = OpenConditionsRecord { o1, o2, o3, o4 };
    let mut ops = vec![f0.clone()];
    let mut levels = Vec::with_capacity(depth + 1);
    let mut ok = o4 == Verdict::Pass;
    for n in 0..=depth {
        let op = &ops[n];
        let cells_invertible = op.all_cells_invertible();
        let shape = op.check_shape();
        let intertwiner = check_level_conditions(op);
        let recursion_exact = if n == 0 {
            None
        } else {
            Some(check_recursion_exact(&ops[n - 1], op))
        };
        let level_ok =
            cells_invertible && shape && intertwiner && recursion_exact.unwrap_or(true);
        levels.push(LevelRecord {
            n,
            cells_invertible,
            shape,
            intertwiner,
            recursion_exact,
        });
        if !level_ok {
            ok = false;
            break;
        }
        if n < depth {
            match advance(op) {
                Ok(next) => ops.push(next),
                Err(_) => {
                    ok = false;
                    break;
                }
            }
        }
    }
    if levels.len() != depth + 1 {
        ok = false;
    }
    Ok(Derived {
        levels,
        open,
        slice,
        ops,
        ok,
        inconclusive: o4 == Verdict::Inconclusive,
    })
}

fn f0_cells(op: &ShapedOperator) -> F0Cells {
    F0Cells {
        diag: op.diag.clone(),
        head: op.head.clone(),
        shift: op.shift.clone(),
    }
}

fn f0_from_cells(layout: &BlockLayout, cells: &F0Cells) -> Result<ShapedOperator> {
    let op = ShapedOperator {
        layout: layout.clone(),
        level: 0,
        diag: cells.diag.clone(),
        head: cells.head.clone(),
        shift: cells.shift.clone(),
    };
    if op.diag.len() != layout.truncation + 1
        || op.shift.len() != layout.truncation
        || !op.check_shape()
    {
        return Err(Error::ShapeMismatch(
            "stored cells do not fit the declared layout".into(),
        ));
    }
    Ok(op)
}

/// Randomized witness search with exact per-instance verification: sample
/// f_0 cellwise, check the open conditions, run the recursion to the target
/// depth re-verifying every level, and seal the result into a certificate.
/// Failure is data, not an error.
pub fn build_witness(hopf: &HopfRef, params: &WitnessParams) -> Result<WitnessOutcome> {
    if params.truncation < params.depth + 2 {
        return Err(Error::InvalidLayout(format!(
            "truncation {} must be at least depth + 2 = {}",
            params.truncation,
            params.depth + 2
        )));
    }
    let layout = make_layout(hopf, params.v1_dim, params.truncation)?;
    let sampler = CellSampler::new(&layout)?;
    let mut rng = ChaCha20Rng::seed_from_u64(params.seed);
    let mut stats = SamplerStats::default();
    let hash = input_hash(hopf);

    let mut last: Option<(ShapedOperator, Derived)> = None;
    let mut attempts = 0;
    while attempts < params.retries.max(1) {
        attempts += 1;
        let f0 = match sampler.sample(&mut rng, params.bound, &mut stats) {
            Ok(f0) => f0,
            Err(Error::SamplingExhausted { .. }) => continue,
            Err(e) => return Err(e),
        };
        let derived = derive_from_f0(&f0, params.depth)?;
        let done = derived.ok;
        last = Some((f0, derived));
        if done {
            break;
        }
    }

    // The verdict is a function of the last attempt's stored operator, so
    // the independent recheck can re-derive it.
    let (verdict, f0, levels, open, slice, witness) = match last {
        Some((f0, d)) if d.ok => {
            let witness = Witness {
                layout: layout.clone(),
                levels: d.ops,
            };
            (
                Verdict::Pass,
                Some(f0_cells(&f0)),
                d.levels,
                Some(d.open),
                Some(d.slice),
                Some(witness),
            )
        }
        Some((f0, d)) => {
            let v = if d.inconclusive {
                Verdict::Inconclusive
            } else {
                Verdict::Fail
            };
            (
                v,
                Some(f0_cells(&f0)),
                d.levels,
                Some(d.open),
                Some(d.slice),
                None,
            )
        }
        None => (Verdict::Fail, None, vec![], None, None, None),
    };

    let diagnostic = match verdict {
        Verdict::Pass => None,
        Verdict::Inconclusive => {
            Some("slice-algebra budget exhausted before saturation".to_string())
        }
        Verdict::Fail => Some(format!(
            "no passing level-0 operator found within {attempts} attempts"
        )),
    };

    let certificate = WitnessCertificate {
        field: hopf.field.clone(),
        input_hash: hash,
        seed: params.seed,
        depth: params.depth,
        truncation: params.truncation,
        v1_dim: params.v1_dim,
        bound: params.bound,
        retries: params.retries,
        attempts,
        cell_redraws: stats.cell_redraws,
        levels,
        open_conditions: open,
        slice_algebra: slice,
        semisimple: None,
        coend_projective: None,
        coend_free: None,
        phi_faithful: None,
        f0,
        diagnostic,
        verdict,
        caveats: vec![CAVEAT_INSTANCE.to_string(), CAVEAT_SLICE.to_string()],
    };
    Ok(WitnessOutcome {
        certificate,
        witness,
    })
}

fn freeness_summary(v: &FreenessVerdict) -> String {
    match v {
        FreenessVerdict::Free { rank, .. } => format!("free: rank {rank}"),
        FreenessVerdict::NotFree { reason } => format!("not_free: {reason}"),
        FreenessVerdict::Inconclusive { reason } => format!("inconclusive: {reason}"),
    }
}

/// The rank of a |-> (action of a on A) is dim A iff the regular
/// representation separates algebra elements.
pub fn phi_faithful(hopf: &HopfRef) -> bool {
    let d = hopf.dim;
    let mut rows = Vec::with_capacity(d * d);
    for r in 0..d * d {
        let (i, j) = (r / d, r % d);
        let mut row = Vec::with_capacity(d);
        for k in 0..d {
            row.push(hopf.left_mult_matrix(k).get(i, j).clone());
        }
        rows.push(row);
    }
    Matrix::from_rows(hopf.field.clone(), rows).rank() == d
}

/// Full non-flatness evidence: semisimplicity must fail, Coend V (for
/// V = A (+) trivial) must be non-projective and non-free as a right module,
/// the witness recursion must succeed, and the regular action must be
/// faithful. The overall verdict is the conjunction.
pub fn certify_nonflat(hopf: &HopfRef, params: &WitnessParams) -> Result<WitnessOutcome> {
    let semisimple = is_semisimple(hopf)?;
    if semisimple {
        let certificate = WitnessCertificate {
            field: hopf.field.clone(),
            input_hash: input_hash(hopf),
            seed: params.seed,
            depth: params.depth,
            truncation: params.truncation,
            v1_dim: params.v1_dim,
            bound: params.bound,
            retries: params.retries,
            attempts: 0,
            cell_redraws: 0,
            levels: vec![],
            open_conditions: None,
            slice_algebra: None,
            semisimple: Some(true),
            coend_projective: None,
            coend_free: None,
            phi_faithful: None,
            f0: None,
            diagnostic: Some(
                "A semisimple: Coend V projective, no non-flatness evidence".to_string(),
            ),
            verdict: Verdict::Fail,
            caveats: vec![CAVEAT_INSTANCE.to_string(), CAVEAT_SLICE.to_string()],
        };
        return Ok(WitnessOutcome {
            certificate,
            witness: None,
        });
    }

    let layout = make_layout(hopf, params.v1_dim, params.truncation)?;
    let v = layout.v_module();
    let c = coend(&v)?;
    let crep = c.as_rep(hopf);
    let proj = is_projective(&crep)?;
    let free = is_free(&crep)?;
    let faithful = phi_faithful(hopf);

    let mut outcome = build_witness(hopf, params)?;
    let cert = &mut outcome.certificate;
    cert.semisimple = Some(false);
    cert.coend_projective = Some(proj.verdict == Projectivity::Projective);
    cert.coend_free = Some(freeness_summary(&free));
    cert.phi_faithful = Some(faithful);
    let evidence_ok = proj.verdict == Projectivity::NotProjective && !free.is_free() && faithful;
    if cert.verdict == Verdict::Pass && !evidence_ok {
        cert.verdict = Verdict::Fail;
    }
    if cert.verdict != Verdict::Pass && cert.diagnostic.is_none() {
        cert.diagnostic = Some("non-flatness evidence incomplete".to_string());
    }
    if !evidence_ok {
        cert.diagnostic = Some(format!(
            "evidence incomplete: coend projective = {:?}, coend freeness = {:?}, faithful = {faithful}",
            proj.verdict,
            freeness_summary(&free)
        ));
    }
    Ok(outcome)
}

/// Independently re-derives every verdict field of a certificate from the
/// input Hopf data and the stored level-0 cells. The result is a fresh
/// certificate that must agree with the stored one byte for byte.
pub fn recheck(hopf: &HopfRef, stored: &WitnessCertificate) -> Result<WitnessCertificate> {
    let mut fresh = stored.clone();
    fresh.field = hopf.field.clone();
    fresh.input_hash = input_hash(hopf);
    fresh.caveats = vec![CAVEAT_INSTANCE.to_string(), CAVEAT_SLICE.to_string()];

    if stored.semisimple == Some(true) {
        fresh.semisimple = Some(is_semisimple(hopf)?);
        return Ok(fresh);
    }

    if let Some(cells) = &stored.f0 {
        let layout = make_layout(hopf, stored.v1_dim, stored.truncation)?;
        let f0 = f0_from_cells(&layout, cells)?;
        let derived = derive_from_f0(&f0, stored.depth)?;
        fresh.levels = derived.levels;
        fresh.open_conditions = Some(derived.open);
        fresh.slice_algebra = Some(derived.slice);
        fresh.verdict = if derived.ok {
            Verdict::Pass
        } else if derived.inconclusive {
            Verdict::Inconclusive
        } else {
            Verdict::Fail
        };
    } else {
        fresh.levels = vec![];
        fresh.open_conditions = None;
        fresh.slice_algebra = None;
        fresh.verdict = Verdict::Fail;
    }

    if stored.coend_projective.is_some() || stored.coend_free.is_some() {
        let layout = make_layout(hopf, stored.v1_dim, stored.truncation)?;
        let v = layout.v_module();
        let c = coend(&v)?;
        let crep = c.as_rep(hopf);
        let proj = is_projective(&crep)?;
        let free = is_free(&crep)?;
        let faithful = phi_faithful(hopf);
        fresh.semisimple = Some(is_semisimple(hopf)?);
        fresh.coend_projective = Some(proj.verdict == Projectivity::Projective);
        fresh.coend_free = Some(freeness_summary(&free));
        fresh.phi_faithful = Some(faithful);
        let evidence_ok =
            proj.verdict == Projectivity::NotProjective && !free.is_free() && faithful;
        if fresh.verdict == Verdict::Pass && !evidence_ok {
            fresh.verdict = Verdict::Fail;
        }
        if !evidence_ok {
            fresh.diagnostic = Some(format!(
                "evidence incomplete: coend projective = {:?}, coend freeness = {:?}, faithful = {faithful}",
                proj.verdict,
                freeness_summary(&free)
            ));
        } else if fresh.verdict == Verdict::Pass {
            fresh.diagnostic = None;
        }
    } else if fresh.verdict == Verdict::Pass {
        fresh.diagnostic = None;
    } else if stored.f0.is_some() {
        fresh.diagnostic = match fresh.verdict {
            Verdict::Inconclusive => {
                Some("slice-algebra budget exhausted before saturation".to_string())
            }
            _ => Some(format!(
                "no passing level-0 operator found within {} attempts",
                stored.attempts
            )),
        };
    }
    Ok(fresh)
}

/// Rebuilds the full witness tower from a passing certificate.
pub fn rebuild_witness(hopf: &HopfRef, cert: &WitnessCertificate) -> Result<Witness> {
    let cells = cert
        .f0
        .as_ref()
        .ok_or_else(|| Error::Parse("certificate stores no level-0 operator".into()))?;
    let layout = make_layout(hopf, cert.v1_dim, cert.truncation)?;
    let f0 = f0_from_cells(&layout, cells)?;
    let derived = derive_from_f0(&f0, cert.depth)?;
    if !derived.ok {
        return Err(Error::Parse(
            "stored operator does not reproduce a passing witness".into(),
        ));
    }
    Ok(Witness {
        layout,
        levels: derived.ops,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hopf::{build_group_algebra, build_sweedler, cyclic_table};
    use std::sync::Arc;

    fn sweedler() -> HopfRef {
        Arc::new(build_sweedler(Field::Rational).unwrap())
    }

    fn f2c2() -> HopfRef {
        Arc::new(build_group_algebra(&cyclic_table(2), Field::prime(2).unwrap()).unwrap())
    }

    #[test]
    fn layout_dims() {
        let h = sweedler();
        let l = make_layout(&h, 1, 6).unwrap();
        assert_eq!(l.diag_cell_dim(), 17);
        assert_eq!(l.shift_cell_dim(), 8);
        assert_eq!(l.head_cell_dim(), 4);

        let g = f2c2();
        let l = make_layout(&g, 1, 4).unwrap();
        assert_eq!(l.diag_cell_dim(), 5);
        assert_eq!(l.shift_cell_dim(), 4);
        assert_eq!(l.head_cell_dim(), 2);

        assert!(matches!(
            make_layout(&g, 1, 0),
            Err(Error::InvalidLayout(_))
        ));
    }

    #[test]
    fn sampling_is_deterministic_and_shaped() {
        let h = f2c2();
        let layout = make_layout(&h, 1, 3).unwrap();
        let a = sample_x0(&layout, 42, 3).unwrap();
        let b = sample_x0(&layout, 42, 3).unwrap();
        assert_eq!(a, b);
        assert!(a.check_shape());
        assert!(check_level_conditions(&a));
        assert!(a.all_cells_invertible());

        assert!(matches!(
            sample_x0(&layout, 1, 0),
            Err(Error::SamplingExhausted { .. })
        ));
    }

    #[test]
    fn advance_alternates_patterns_exactly() {
        let h = f2c2();
        let layout = make_layout(&h, 1, 4).unwrap();
        let f0 = sample_x0(&layout, 7, 2).unwrap();
        let f1 = advance(&f0).unwrap();
        assert_eq!(f1.level, 1);
        assert!(f1.check_shape());
        assert!(check_level_conditions(&f1));
        assert!(check_recursion_exact(&f0, &f1));
        assert_eq!(f1.diag_max(), 3);
        assert_eq!(f1.shift_max(), 4);

        let f2 = advance(&f1).unwrap();
        assert_eq!(f2.level, 2);
        assert!(f2.check_shape());
        assert!(check_level_conditions(&f2));
        assert!(check_recursion_exact(&f1, &f2));
        assert_eq!(f2.diag_max(), 3);
        assert_eq!(f2.shift_max(), 3);
    }

    #[test]
    fn level_conditions_reject_non_intertwiners() {
        let h = f2c2();
        let layout = make_layout(&h, 1, 3).unwrap();
        let mut f0 = sample_x0(&layout, 5, 2).unwrap();
        assert!(check_level_conditions(&f0));
        // The identity is invertible and shape-compatible on the D_0 cell
        // but does not intertwine the regular and trivial structures.
        f0.diag[0] = Matrix::identity(h.field.clone(), layout.diag_cell_dim());
        assert!(f0.check_shape());
        assert!(!check_level_conditions(&f0));
    }

    #[test]
    fn advance_all_identity_cells_reproduces_odd_shape() {
        // Over k[C2] every cell pair carries matching structures up to the
        // regular block, so the all-identity operator is a legal shaped
        // operator; one step lands exactly in the odd pattern.
        let h = f2c2();
        let layout = make_layout(&h, 1, 3).unwrap();
        let field = h.field.clone();
        let m = layout.truncation;
        let f0 = ShapedOperator {
            layout: layout.clone(),
            level: 0,
            diag: vec![Matrix::identity(field.clone(), layout.diag_cell_dim()); m + 1],
            head: Matrix::identity(field.clone(), layout.head_cell_dim()),
            shift: vec![Matrix::identity(field.clone(), layout.shift_cell_dim()); m],
        };
        assert!(f0.check_shape());
        let f1 = advance(&f0).unwrap();
        assert_eq!(f1.level, 1);
        assert!(f1.check_shape());
        assert!(check_recursion_exact(&f0, &f1));
    }

    #[test]
    fn advance_reports_the_singular_cell() {
        let h = f2c2();
        let layout = make_layout(&h, 1, 3).unwrap();
        let mut f0 = sample_x0(&layout, 5, 2).unwrap();
        f0.shift[1] = Matrix::zero(h.field.clone(), layout.shift_cell_dim(), layout.shift_cell_dim());
        match advance(&f0) {
            Err(Error::CellSingular(which)) => assert!(which.contains("W2"), "{which}"),
            other => panic!("expected CellSingular, got {other:?}"),
        }
    }

    #[test]
    fn o4_budget_exhaustion_is_inconclusive() {
        let h = sweedler();
        let layout = make_layout(&h, 1, 3).unwrap();
        let f0 = sample_x0(&layout, 7, 3).unwrap();
        let (with_budget, _) = check_o4(&f0, DEFAULT_SLICE_BUDGET).unwrap();
        if with_budget == Verdict::Pass {
            // Starving the closure cannot turn a pass into a fail, only
            // into a distinct inconclusive record (unless the span already
            // saturates without any product).
            let (starved, rec) = check_o4(&f0, 0).unwrap();
            assert!(
                starved == Verdict::Pass && !rec.budget_exhausted
                    || starved == Verdict::Inconclusive && rec.budget_exhausted,
                "starved verdict {starved:?}, record {rec:?}"
            );
        }
    }

    #[test]
    fn recursion_check_rejects_tampering() {
        let h = Arc::new(
            build_group_algebra(&cyclic_table(3), Field::prime(3).unwrap()).unwrap(),
        );
        let layout = make_layout(&h, 1, 3).unwrap();
        let f0 = sample_x0(&layout, 11, 2).unwrap();
        let mut f1 = advance(&f0).unwrap();
        assert!(check_recursion_exact(&f0, &f1));
        // Scaling a cell preserves shape and intertwining but breaks the
        // exact inverse law.
        f1.head = f1.head.scale(&h.field.from_i64(2));
        assert!(f1.check_shape());
        assert!(check_level_conditions(&f1));
        assert!(!check_recursion_exact(&f0, &f1));
    }

    #[test]
    fn dense_embedding_matches_shape_and_conditions() {
        let h = f2c2();
        let layout = make_layout(&h, 1, 3).unwrap();
        let f0 = sample_x0(&layout, 3, 2).unwrap();
        let (dense, idx) = to_dense(&f0);
        assert!(check_shape_dense(&dense.matrix, &f0, &idx));

        // An entry outside the declared cells breaks the dense shape test:
        // U^0_1 (x) V_0 -> U^0_0 (x) V_0 touches no cell.
        let mut bad = dense.matrix.clone();
        let r = (idx.u_offset(0, 0)) * idx.v_total();
        let c = (idx.u_offset(0, 1)) * idx.v_total();
        bad.set(r, c, h.field.one());
        assert!(!check_shape_dense(&bad, &f0, &idx));

        // The dense operator intertwines the truncated twisted structures.
        let u = dense_u_module(&layout, &idx);
        let v = layout.v_module();
        assert!(crate::coend::check_cond(&dense, 0, &u, &v).unwrap());
    }

    #[test]
    fn open_conditions_on_crafted_operators() {
        let h = f2c2();
        let layout = make_layout(&h, 1, 3).unwrap();
        let f0 = sample_x0(&layout, 19, 2).unwrap();
        let (o1, o2, o3) = check_o123(&f0).unwrap();
        // Sampled cells are invertible, so O1 and O2 hold by construction.
        assert!(o1 && o2);
        let _ = o3;

        let mut zero_head = f0.clone();
        zero_head.head = Matrix::zero(h.field.clone(), 2, 2);
        let (_, o2, _) = check_o123(&zero_head).unwrap();
        assert!(!o2);

        // Zeroing the W_1 component U^1_0 (x) V_0 -> U^0_0 (x) V_1 kills O3.
        let mut zero_w = f0.clone();
        let (src, tgt) = cell_blocks(Parity::Even, CellId::Shift(1));
        let toff = block_offsets(&layout, &tgt);
        let soff = block_offsets(&layout, &src);
        for r in toff[1]..toff[2] {
            for c in soff[0]..soff[1] {
                zero_w.shift[0].set(r, c, h.field.zero());
            }
        }
        let (_, _, o3) = check_o123(&zero_w).unwrap();
        assert!(!o3);
    }

    #[test]
    fn exchange_operator_properties() {
        let h = f2c2();
        let f = exchange_operator(&h);
        let d = h.dim;
        // 1 (x) y -> y (x) 1 for all basis y.
        for y in 0..d {
            for a in 0..d {
                for b in 0..d {
                    let got = f.matrix.get(a * d + b, 0 * d + y);
                    let expect = if a == y && b == 0 {
                        h.field.one()
                    } else {
                        h.field.zero()
                    };
                    assert_eq!(got, &expect);
                }
            }
        }
        // g (x) g -> 1 (x) g over F2[C2].
        let got = f.matrix.get(0 * d + 1, 1 * d + 1);
        assert!(got.is_one());
        // A-linear A (x) A -> A_triv (x) A.
        let reg = Rep::regular(&h, Side::Left);
        assert!(crate::coend::check_cond(&f, 0, &reg, &reg).unwrap());
    }

    #[test]
    fn slice_algebra_examples() {
        let h = f2c2();
        let f = exchange_operator(&h);
        let rec = slice_algebra(&f, DEFAULT_SLICE_BUDGET);
        assert_eq!(rec.dim, 4);
        assert!(rec.saturated);

        let id = EndoOnTensor::identity(Field::Rational, 2, 2, Parity::Even);
        let rec = slice_algebra(&id, DEFAULT_SLICE_BUDGET);
        assert_eq!(rec.dim, 1);
        assert!(!rec.saturated);
        assert!(!rec.budget_exhausted);

        // The swap-style operator u (x) v -> v (x) u saturates.
        let field = Field::Rational;
        let n = 3;
        let mut m = Matrix::zero(field.clone(), n * n, n * n);
        for u in 0..n {
            for v in 0..n {
                m.set(v * n + u, u * n + v, field.one());
            }
        }
        let swap = EndoOnTensor::new(n, n, Parity::Even, m).unwrap();
        let rec = slice_algebra(&swap, DEFAULT_SLICE_BUDGET);
        assert!(rec.saturated, "swap slices generate End V: {rec:?}");
    }

    #[test]
    fn bruteforce_invariant_subspaces() {
        let h = f2c2();
        let id = EndoOnTensor::identity(h.field.clone(), 2, 2, Parity::Even);
        let found = invariant_subspace_bruteforce(&id).unwrap();
        assert!(found.is_some());
        assert_eq!(found.unwrap().rows(), 1);

        let f = exchange_operator(&h);
        assert!(invariant_subspace_bruteforce(&f).unwrap().is_none());

        let big = EndoOnTensor::identity(h.field.clone(), 1, 4, Parity::Even);
        assert!(matches!(
            invariant_subspace_bruteforce(&big),
            Err(Error::TooLarge(_))
        ));
    }

    #[test]
    fn cross_oracle_saturation_vs_bruteforce() {
        // Whenever the slice algebra saturates and the brute force applies,
        // no invariant subspace exists.
        let f3c3 = Arc::new(
            build_group_algebra(&cyclic_table(3), Field::prime(3).unwrap()).unwrap(),
        );
        for h in [f2c2(), f3c3] {
            let f = exchange_operator(&h);
            let rec = slice_algebra(&f, DEFAULT_SLICE_BUDGET);
            if rec.saturated && h.dim <= 3 {
                assert!(invariant_subspace_bruteforce(&f).unwrap().is_none());
            }
        }
    }

    #[test]
    fn f2_witness_records_elevated_retries() {
        // Over the 2-element field the open conditions are far from generic:
        // depth-1 witnesses exist but need several attempts, and the
        // certificate keeps the survival statistics.
        let h = f2c2();
        let params = WitnessParams {
            v1_dim: 1,
            depth: 1,
            truncation: 3,
            seed: 3,
            bound: 1,
            retries: 200,
        };
        let out = build_witness(&h, &params).unwrap();
        assert_eq!(out.certificate.verdict, Verdict::Pass);
        assert!(
            out.certificate.attempts > 1 || out.certificate.cell_redraws > 0,
            "expected elevated retry statistics over F2: attempts={} redraws={}",
            out.certificate.attempts,
            out.certificate.cell_redraws
        );
    }

    #[test]
    fn certificates_are_deterministic_and_recheckable() {
        let h = sweedler();
        let params = WitnessParams {
            v1_dim: 1,
            depth: 2,
            truncation: 4,
            seed: 9,
            bound: 3,
            retries: 50,
        };
        let a = build_witness(&h, &params).unwrap().certificate;
        let b = build_witness(&h, &params).unwrap().certificate;
        assert_eq!(a.to_canonical_json(), b.to_canonical_json());

        // Independent re-derivation reproduces the certificate exactly.
        let fresh = recheck(&h, &a).unwrap();
        assert_eq!(a.to_canonical_json(), fresh.to_canonical_json());

        // A flipped cell entry must surface as a divergence.
        let mut tampered = a.clone();
        if let Some(f0) = &mut tampered.f0 {
            let v = f0.head.get(0, 0).add(&h.field.one());
            f0.head.set(0, 0, v);
        }
        let fresh = recheck(&h, &tampered).unwrap();
        assert_ne!(tampered.to_canonical_json(), fresh.to_canonical_json());
    }

    #[test]
    fn dense_conditions_along_the_recursion() {
        // The alternating intertwiner conditions hold for the dense
        // embeddings of every level: the operator image of the convolution
        // inverse at level n+1 satisfies the twisted condition with the
        // exponent raised by one.
        let h = sweedler();
        let params = WitnessParams {
            v1_dim: 1,
            depth: 3,
            truncation: 5,
            seed: 13,
            bound: 3,
            retries: 50,
        };
        let out = build_witness(&h, &params).unwrap();
        assert_eq!(out.certificate.verdict, Verdict::Pass);
        let w = out.witness.unwrap();
        let v = w.layout.v_module();
        for n in 0..=3usize {
            let (dense, idx) = to_dense(&w.levels[n]);
            let u = dense_u_module(&w.layout, &idx);
            assert!(
                crate::coend::check_cond(&dense, n as i64, &u, &v).unwrap(),
                "dense condition fails at level {n}"
            );
        }
    }

    #[test]
    fn degenerate_depth_zero_witness() {
        let h = f2c2();
        let params = WitnessParams {
            v1_dim: 1,
            depth: 0,
            truncation: 2,
            seed: 5,
            bound: 2,
            retries: 50,
        };
        let out = build_witness(&h, &params).unwrap();
        assert_eq!(out.certificate.levels.len(), 1);
        assert!(out.certificate.attempts >= 1);
        // Depth exceeding the headroom is a parameter error.
        let bad = WitnessParams {
            depth: 1,
            truncation: 2,
            ..params
        };
        assert!(matches!(
            build_witness(&h, &bad),
            Err(Error::InvalidLayout(_))
        ));
    }
}
