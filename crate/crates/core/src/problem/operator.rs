//! The stochastic Galerkin operator as a sum of Kronecker terms
//! `Ā ⊗ I ⊗ ⋯ ⊗ I + Σ_j B_j ⊗ (I ⊗ ⋯ ⊗ N_j ⊗ ⋯ ⊗ I)`.
//!
//! Mode-0 blocks are assembled for explicit row/column supports, with stiffness
//! entries memoized per `(parameter, λ, λ′)`.

use super::basis::{HatBasis, SpatialBasis, SpatialIndex};
use super::field::{Coefficient, CoefficientField, Parameter, SpectralBounds};
use super::index::{IndexUniverse, SparseModeIndex, TailIndex};
use super::legendre;
use super::quadrature::gauss4_composite;
use super::sparse::Csr;
use crate::error::{ProblemError, TensorError};
use crate::tensor::{DimensionTree, HTensor, ProductIndexSet};
use nalgebra::DMatrix;
use parking_lot::RwLock;
use std::collections::HashMap;
use std::sync::Arc;

pub type Mode0 = SparseModeIndex;
pub type SolutionTensor = HTensor<SparseModeIndex>;
pub type IndexSet = ProductIndexSet<SparseModeIndex>;

/// Finest spatial level the implementation handles.
pub const MAX_LEVEL: u8 = 30;

/// Entries below this magnitude (relative to the coefficient size) are roundoff zeros.
const ENTRY_ZERO: f64 = 1e-15;

/// `∫ θ ψ'_λ ψ'_μ dx` by composite Gauss quadrature on the joint breakpoints.
pub fn stiffness_entry<B: SpatialBasis>(basis: &B, theta: &Coefficient, lam: SpatialIndex, mu: SpatialIndex) -> f64 {
    let (a1, b1) = lam.support();
    let (a2, b2) = mu.support();
    let (a3, b3) = theta.support();
    let lo = a1.max(a2).max(a3);
    let hi = b1.min(b2).min(b3);
    if hi <= lo {
        return 0.0;
    }
    let mut br: Vec<f64> = basis.breakpoints(lam);
    br.extend(basis.breakpoints(mu));
    br.extend(theta.breakpoints());
    br.push(lo);
    br.push(hi);
    br.retain(|&x| x >= lo && x <= hi);
    br.sort_by(|a, b| a.partial_cmp(b).unwrap());
    br.dedup();
    gauss4_composite(&br, |x| theta.eval(x) * basis.derivative(lam, x) * basis.derivative(mu, x))
}

/// Sorted mode-0 rows grouped by tail index and level, for overlap queries.
pub struct Mode0Lookup {
    groups: HashMap<TailIndex, Vec<(u8, Vec<(u32, usize)>)>>,
}

impl Mode0Lookup {
    pub fn new(rows: &[SparseModeIndex]) -> Self {
        let mut groups: HashMap<TailIndex, Vec<(u8, Vec<(u32, usize)>)>> = HashMap::new();
        for (pos, r) in rows.iter().enumerate() {
            let g = groups.entry(r.nu.clone()).or_default();
            match g.last_mut() {
                Some((l, v)) if *l == r.lambda.level => v.push((r.lambda.k, pos)),
                _ => g.push((r.lambda.level, vec![(r.lambda.k, pos)])),
            }
        }
        for g in groups.values_mut() {
            g.sort_by_key(|(l, _)| *l);
            for (_, v) in g.iter_mut() {
                v.sort_unstable();
            }
        }
        Mode0Lookup { groups }
    }

    /// Row positions with tail index `nu` whose spatial support meets `(a, b)`.
    fn for_each_overlap(&self, nu: &TailIndex, a: f64, b: f64, mut f: impl FnMut(SpatialIndex, usize)) {
        let Some(g) = self.groups.get(nu) else { return };
        for (level, ks) in g {
            let r = SpatialIndex::overlapping(*level, a, b);
            if r.is_empty() {
                continue;
            }
            let start = ks.partition_point(|&(k, _)| k < r.start);
            for &(k, pos) in &ks[start..] {
                if k >= r.end {
                    break;
                }
                f(SpatialIndex { level: *level, k }, pos);
            }
        }
    }
}

/// One Kronecker term restricted to row and column supports.
#[derive(Clone, Debug)]
pub struct BlockTerm {
    /// 0 for the mean-plus-tail term, `j` for `B_j ⊗ N_j`.
    pub term: usize,
    pub mode0: Csr,
    pub coupling: Option<DMatrix<f64>>,
}

/// The operator restricted to `rows × cols`, ready to act on tensors supported in `cols`.
#[derive(Clone, Debug)]
pub struct OperatorBlock {
    pub rows: IndexSet,
    pub cols: IndexSet,
    pub terms: Vec<BlockTerm>,
    tree: Arc<DimensionTree>,
}

impl OperatorBlock {
    /// `R_rows A v` for `supp v ⊆ cols`: all terms assembled exactly, then recompressed once.
    pub fn apply(&self, v: &SolutionTensor) -> Result<SolutionTensor, TensorError> {
        if !v.support().is_subset(&self.cols) {
            return Err(TensorError::Shape("operand support exceeds block columns".into()));
        }
        let v = v.embed(&self.cols);
        if v.is_zero() {
            return Ok(HTensor::zero(self.tree.clone(), self.rows.clone()));
        }
        let j = self.tree.j();
        let embeds: Vec<Vec<usize>> = (1..=j)
            .map(|m| {
                crate::tensor::index_set::positions_in(&self.cols.modes[m - 1], &self.rows.modes[m - 1])
                    .into_iter()
                    .map(|p| p.expect("block rows must contain columns in identity modes"))
                    .collect()
            })
            .collect();
        let shared: Vec<DMatrix<f64>> = (0..=j)
            .map(|m| {
                let f = v.frame(m);
                let mut g = DMatrix::zeros(self.rows.mode_len(m), f.ncols());
                if m > 0 {
                    for (r, &p) in embeds[m - 1].iter().enumerate() {
                        g.row_mut(p).copy_from(&f.row(r));
                    }
                }
                g
            })
            .collect();
        let terms: Vec<Vec<(usize, DMatrix<f64>)>> = self
            .terms
            .iter()
            .map(|t| {
                let mut fs = vec![(0, t.mode0.mul_dense(v.frame(0)))];
                if t.term > 0 {
                    fs.push((t.term, t.coupling.as_ref().expect("coupling block") * v.frame(t.term)));
                }
                fs
            })
            .collect();
        Ok(v.kronecker_sum(self.rows.clone(), shared, &terms)?.recompress())
    }

    /// Dense Kronecker assembly (rows and columns row-major over the supports, mode 0 slowest).
    pub fn to_dense(&self) -> DMatrix<f64> {
        let j = self.tree.j();
        let (nr, nc): (usize, usize) = (self.rows.cardinality(), self.cols.cardinality());
        let mut out = DMatrix::zeros(nr, nc);
        let pos: Vec<Vec<Option<usize>>> = (1..=j)
            .map(|m| crate::tensor::index_set::positions_in(&self.cols.modes[m - 1], &self.rows.modes[m - 1]))
            .collect();
        for t in &self.terms {
            let mut acc = t.mode0.to_dense();
            for m in 1..=j {
                let f = if m == t.term {
                    t.coupling.clone().unwrap()
                } else {
                    let mut e = DMatrix::zeros(self.rows.mode_len(m), self.cols.mode_len(m));
                    for (c, p) in pos[m - 1].iter().enumerate() {
                        if let Some(p) = p {
                            e[(*p, c)] = 1.0;
                        }
                    }
                    e
                };
                acc = acc.kronecker(&f);
            }
            out += acc;
        }
        out
    }
}

/// The parametric operator of a field, with lazily memoized stiffness entries.
pub struct ParametricOperator {
    field: CoefficientField,
    params: Vec<Parameter>,
    universe: IndexUniverse,
    bounds: SpectralBounds,
    tree: Arc<DimensionTree>,
    basis: HatBasis,
    memo: RwLock<HashMap<(u16, SpatialIndex, SpatialIndex), f64>>,
}

/// Where row candidates come from during column assembly.
enum Rows<'a> {
    /// Only rows of an existing support.
    Within(&'a Mode0Lookup),
    /// Every admissible row up to the spatial window `Δℓ`.
    Window(&'a SpatialWindow),
}

/// Spatial window `Δℓ`, chosen separately for each column level.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpatialWindow(Vec<u8>);

impl SpatialWindow {
    pub fn uniform(delta: u8) -> Self {
        SpatialWindow(vec![delta; MAX_LEVEL as usize + 1])
    }

    /// Window per column level, starting at level 0; missing levels get window 0.
    pub fn from_levels(mut levels: Vec<u8>) -> Self {
        levels.resize(MAX_LEVEL as usize + 1, 0);
        SpatialWindow(levels)
    }

    pub fn levels(&self) -> &[u8] {
        &self.0
    }

    pub fn at(&self, level: u8) -> u8 {
        self.0[level.min(MAX_LEVEL) as usize]
    }

    /// Largest window over all column levels.
    pub fn max(&self) -> u8 {
        self.0.iter().copied().max().unwrap_or(0)
    }
}

impl ParametricOperator {
    pub fn new(field: CoefficientField, universe: IndexUniverse) -> Result<Self, ProblemError> {
        field.validate()?;
        if field.num_params() > u16::MAX as usize {
            return Err(ProblemError::InvalidField("too many parameters".into()));
        }
        let bounds = field.spectral_bounds()?;
        let params = field.parameters();
        let tree = Arc::new(DimensionTree::linear(field.j_split));
        Ok(ParametricOperator { field, params, universe, bounds, tree, basis: HatBasis, memo: RwLock::new(HashMap::new()) })
    }

    pub fn field(&self) -> &CoefficientField {
        &self.field
    }

    pub fn universe(&self) -> &IndexUniverse {
        &self.universe
    }

    pub fn bounds(&self) -> SpectralBounds {
        self.bounds
    }

    pub fn tree(&self) -> Arc<DimensionTree> {
        self.tree.clone()
    }

    /// Number of parametric tensor modes `J`.
    pub fn j(&self) -> usize {
        self.field.j_split
    }

    pub fn num_terms(&self) -> usize {
        self.j() + 1
    }

    /// Parameters kept inside the sparse mode.
    pub fn tail_params(&self) -> &[Parameter] {
        &self.params[self.j()..]
    }

    pub fn mode_param(&self, j: usize) -> &Parameter {
        &self.params[j - 1]
    }

    pub fn max_level(&self) -> u8 {
        self.universe.max_level.unwrap_or(MAX_LEVEL).min(MAX_LEVEL)
    }

    pub fn memo_len(&self) -> usize {
        self.memo.read().len()
    }

    /// `∫ θ_p ψ'_λ ψ'_μ`, memoized.
    pub fn entry(&self, p: &Parameter, lam: SpatialIndex, mu: SpatialIndex) -> f64 {
        let key = if lam <= mu { (p.index as u16, lam, mu) } else { (p.index as u16, mu, lam) };
        if let Some(&v) = self.memo.read().get(&key) {
            return v;
        }
        let v = stiffness_entry(&self.basis, &p.theta, key.1, key.2);
        self.memo.write().insert(key, v);
        v
    }

    fn level_kept(&self, p: &Parameter, cutoff: Option<u8>) -> bool {
        match (p.level, cutoff) {
            (Some(l), Some(c)) => l < c,
            _ => true,
        }
    }

    /// Calls `f(ν′, coefficient, parameter)` for every parameter coupling that term `q` produces
    /// from a column with tail index `nu` and spatial index `lam`. `None` marks the mean part.
    fn for_each_coupling(
        &self,
        q: usize,
        col: &SparseModeIndex,
        cutoff: Option<u8>,
        mut f: impl FnMut(&TailIndex, f64, Option<&Parameter>),
    ) {
        if q > 0 {
            f(&col.nu, 1.0, Some(self.mode_param(q)));
            return;
        }
        if self.field.mean != 0.0 {
            f(&col.nu, self.field.mean, None);
        }
        let (a, b) = col.lambda.support();
        for p in self.tail_params() {
            if !self.level_kept(p, cutoff) {
                continue;
            }
            let (ta, tb) = p.theta.support();
            if ta.max(a) >= tb.min(b) {
                continue;
            }
            let pid = p.index as u16;
            let d = col.nu.degree(pid);
            for nd in [d + 1, d.wrapping_sub(1)] {
                if nd == u32::MAX || !self.universe.degree_ok(nd) || nd > u16::MAX as u32 {
                    continue;
                }
                let c = legendre::coupling(d, nd);
                f(&col.nu.with_degree(pid, nd), c, Some(p));
            }
        }
    }

    /// Finest row level kept for a column at `level` and coefficient `theta` under window `delta`.
    fn window_end(&self, theta: &Coefficient, level: u8, delta: u8) -> u8 {
        let end = match *theta {
            Coefficient::Constant(_) => level,
            Coefficient::Hat { level: lt, .. } => level.max(lt).saturating_add(delta),
            Coefficient::Indicator { .. } => match theta.smooth_level() {
                Some(s) => level.max(s.saturating_sub(1)),
                None => level.saturating_add(delta),
            },
        };
        end.min(self.max_level())
    }

    fn column_entries(&self, q: usize, col: &SparseModeIndex, cutoff: Option<u8>, rows: &Rows, mut out: impl FnMut(RowHit, f64)) {
        let lam = col.lambda;
        let (a, b) = lam.support();
        self.for_each_coupling(q, col, cutoff, |nu, c, p| {
            let Some(p) = p else {
                match rows {
                    Rows::Within(lk) => lk.for_each_overlap(nu, a, b, |l2, pos| {
                        if l2 == lam {
                            out(RowHit::Pos(pos), c);
                        }
                    }),
                    Rows::Window(_) => out(RowHit::Key(SparseModeIndex { nu: nu.clone(), lambda: lam }), c),
                }
                return;
            };
            let (ta, tb) = p.theta.support();
            let (ra, rb) = (a.max(ta), b.min(tb));
            let scale = c.abs() * p.theta.sup() * HatBasis::slope(lam.level);
            let mut emit = |l2: SpatialIndex, hit: RowHit| {
                let e = c * self.entry(p, l2, lam);
                if e.abs() > ENTRY_ZERO * scale * HatBasis::slope(l2.level) * (rb - ra) {
                    out(hit, e);
                }
            };
            match rows {
                Rows::Within(lk) => lk.for_each_overlap(nu, ra, rb, |l2, pos| emit(l2, RowHit::Pos(pos))),
                Rows::Window(window) => {
                    let end = self.window_end(&p.theta, lam.level, window.at(lam.level));
                    for l in 0..=end {
                        for k in SpatialIndex::overlapping(l, ra, rb) {
                            let l2 = SpatialIndex { level: l, k };
                            emit(l2, RowHit::Key(SparseModeIndex { nu: nu.clone(), lambda: l2 }));
                        }
                    }
                }
            }
        });
    }

    /// `R_Λ A_L R_Λ` for the product set `Λ`; terms that vanish on `Λ` are dropped.
    pub fn galerkin_block(&self, set: &IndexSet, cutoff: Option<u8>) -> OperatorBlock {
        let lookup = Mode0Lookup::new(&set.mode0);
        let rows = Rows::Within(&lookup);
        let n0 = set.mode_len(0);
        let mut terms = Vec::new();
        for q in 0..self.num_terms() {
            let coupling = (q > 0).then(|| legendre::coupling_matrix(&set.modes[q - 1], &set.modes[q - 1]));
            if coupling.as_ref().is_some_and(|m| m.iter().all(|&x| x == 0.0)) {
                continue;
            }
            let mut trip = Vec::new();
            for (ci, col) in set.mode0.iter().enumerate() {
                self.column_entries(q, col, cutoff, &rows, |hit, v| {
                    if let RowHit::Pos(r) = hit {
                        trip.push((r, ci, v));
                    }
                });
            }
            let mode0 = Csr::from_triplets(n0, n0, trip);
            if mode0.nnz() > 0 {
                terms.push(BlockTerm { term: q, mode0, coupling });
            }
        }
        OperatorBlock { rows: set.clone(), cols: set.clone(), terms, tree: self.tree.clone() }
    }

    /// Rows `{ν ± 1 : ν ∈ cols} ∪ cols` in each parametric mode, within the universe.
    pub fn mode_neighbors(&self, cols: &[u32]) -> Vec<u32> {
        let mut v: Vec<u32> = cols.iter().flat_map(|&d| [d.wrapping_sub(1), d, d + 1]).filter(|&d| d != u32::MAX).collect();
        v.retain(|&d| self.universe.degree_ok(d));
        v.sort_unstable();
        v.dedup();
        v
    }

    /// The one-application neighborhood block: columns `cols`, rows every index reached by the
    /// level-truncated terms inside spatial window `delta`, united with `extra`.
    pub fn neighborhood_block(
        &self,
        cols: &IndexSet,
        cutoff: Option<u8>,
        window: &SpatialWindow,
        extra: Option<&IndexSet>,
    ) -> OperatorBlock {
        let rows_w = Rows::Window(window);
        let mut per_term: Vec<Vec<(SparseModeIndex, usize, f64)>> = Vec::new();
        let mut keys: Vec<SparseModeIndex> = extra.map(|e| e.mode0.clone()).unwrap_or_default();
        keys.extend(cols.mode0.iter().cloned());
        for q in 0..self.num_terms() {
            let mut trip = Vec::new();
            for (ci, col) in cols.mode0.iter().enumerate() {
                self.column_entries(q, col, cutoff, &rows_w, |hit, v| {
                    if let RowHit::Key(k) = hit {
                        trip.push((k, ci, v));
                    }
                });
            }
            keys.extend(trip.iter().map(|t| t.0.clone()));
            per_term.push(trip);
        }
        keys.sort_unstable();
        keys.dedup();
        let mut modes: Vec<Vec<u32>> = cols.modes.iter().map(|m| self.mode_neighbors(m)).collect();
        if let Some(e) = extra {
            for (m, em) in modes.iter_mut().zip(&e.modes) {
                *m = crate::tensor::index_set::merge_sorted(m, em);
            }
        }
        let rows = ProductIndexSet { mode0: keys, modes };
        let n0 = rows.mode_len(0);
        let mut terms = Vec::new();
        for (q, trip) in per_term.into_iter().enumerate() {
            let trip: Vec<(usize, usize, f64)> =
                trip.into_iter().map(|(k, c, v)| (rows.mode0.binary_search(&k).expect("row key"), c, v)).collect();
            let mode0 = Csr::from_triplets(n0, cols.mode_len(0), trip);
            if mode0.nnz() == 0 {
                continue;
            }
            let coupling = (q > 0).then(|| legendre::coupling_matrix(&rows.modes[q - 1], &cols.modes[q - 1]));
            terms.push(BlockTerm { term: q, mode0, coupling });
        }
        OperatorBlock { rows, cols: cols.clone(), terms, tree: self.tree.clone() }
    }

    /// `A_L v` up to the spatial window `delta`; exact (up to the level cutoff) once `delta`
    /// reaches the universe's finest level.
    pub fn apply(&self, v: &SolutionTensor, cutoff: Option<u8>, delta: u8) -> Result<SolutionTensor, TensorError> {
        self.neighborhood_block(v.support(), cutoff, &SpatialWindow::uniform(delta), None).apply(v)
    }

    /// Exact application; requires a universe with a finite spatial level.
    pub fn apply_exact(&self, v: &SolutionTensor, cutoff: Option<u8>) -> Result<SolutionTensor, ProblemError> {
        if self.universe.max_level.is_none() {
            return Err(ProblemError::OutsideUniverse("exact application needs a level cap".into()));
        }
        Ok(self.apply(v, cutoff, MAX_LEVEL)?)
    }

    /// Minimal tail level `L` with `c2 Σ_{ℓ≥L} 2^{−αℓ} · norm ≤ tol`.
    pub fn level_cutoff(&self, norm: f64, tol: f64) -> u8 {
        let levels = self.field.tail_levels();
        let first = *levels.start();
        let last = *levels.end();
        if levels.is_empty() {
            return first;
        }
        for l in first..=last {
            if self.field.tail_sup_sum(l) * norm <= tol {
                return l;
            }
        }
        last + 1
    }

    /// Certified bound on `‖(A_L − A_{L,Δ}) w‖`, the mass discarded by the spatial window.
    ///
    /// `weights` are the mode-0 contractions `π^(0)(w)` aligned with `cols`.
    pub fn window_discard_bound(&self, cols: &[SparseModeIndex], weights: &[f64], cutoff: Option<u8>, window: &SpatialWindow) -> f64 {
        let table = self.discard_table(cols, weights, cutoff);
        table.iter().enumerate().map(|(c, row)| row[window.at(c as u8) as usize]).sum()
    }

    /// A per-level window whose discard bound is at most `tol`, together with that bound.
    ///
    /// Levels are widened greedily by bound reduction per added row (rows grow like
    /// `#columns · 2^Δ`). If `tol` cannot be met the widest window is returned.
    pub fn choose_window(&self, cols: &[SparseModeIndex], weights: &[f64], cutoff: Option<u8>, tol: f64) -> (SpatialWindow, f64) {
        let table = self.discard_table(cols, weights, cutoff);
        let last = self.max_level() as usize;
        let mut count = vec![0f64; table.len()];
        for (col, &w) in cols.iter().zip(weights) {
            if w != 0.0 {
                count[col.lambda.level as usize] += 1.0;
            }
        }
        let mut win = vec![0u8; table.len()];
        let mut total: f64 = table.iter().map(|r| r[0]).sum();
        while total > tol {
            let mut best: Option<(usize, f64)> = None;
            for c in 0..table.len() {
                let d = win[c] as usize;
                if d >= last {
                    continue;
                }
                let gain = table[c][d] - table[c][d + 1];
                if gain <= 0.0 {
                    continue;
                }
                let score = gain / (count[c] * (d as f64).exp2());
                if best.is_none_or(|(_, s)| score > s) {
                    best = Some((c, score));
                }
            }
            let Some((c, _)) = best else { break };
            win[c] += 1;
            total = table.iter().zip(&win).map(|(r, &d)| r[d as usize]).sum();
        }
        (SpatialWindow(win), total)
    }

    /// `table[c][Δ]`: discard bound contributed by the columns on level `c` under window `Δ`.
    fn discard_table(&self, cols: &[SparseModeIndex], weights: &[f64], cutoff: Option<u8>) -> Vec<Vec<f64>> {
        let cap = self.max_level();
        let widths = cap as usize + 1;
        // Discarded rows lie in `supp λ ∩ supp θ` on levels finer than both. For a fixed term,
        // shift direction, tail level and column level they are therefore disjoint across
        // columns and across the (disjointly supported) hats of that level, so they combine
        // in ℓ2. This holds for the hats inside the mean term and for the Kronecker terms of
        // same-level hats alike. The groups themselves add up linearly.
        let mut acc: HashMap<(bool, GroupParam, bool, u8), Vec<f64>> = HashMap::new();
        for (col, &w) in cols.iter().zip(weights) {
            if w == 0.0 {
                continue;
            }
            for q in 0..self.num_terms() {
                self.for_each_coupling(q, col, cutoff, |nu, c, p| {
                    let Some(p) = p else { return };
                    if self.column_discard_sq(&p.theta, col.lambda, 0, cap) == 0.0 {
                        return;
                    }
                    let pid = p.index as u16;
                    let up = nu.degree(pid) > col.nu.degree(pid);
                    let g = match p.level {
                        Some(l) => GroupParam::Level(l),
                        None => GroupParam::Single(pid),
                    };
                    let slot = acc.entry((q == 0, g, up, col.lambda.level)).or_insert_with(|| vec![0.0; widths]);
                    for (d, v) in slot.iter_mut().enumerate() {
                        *v += c * c * self.column_discard_sq(&p.theta, col.lambda, d as u8, cap) * w * w;
                    }
                });
            }
        }
        let mut per_level: Vec<Vec<Vec<f64>>> = vec![Vec::new(); MAX_LEVEL as usize + 1];
        for ((_, _, _, level), v) in acc {
            per_level[level as usize].push(v.into_iter().map(f64::sqrt).collect());
        }
        per_level
            .into_iter()
            .map(|groups| {
                (0..widths)
                    .map(|d| {
                        let mut parts: Vec<f64> = groups.iter().map(|g| g[d]).collect();
                        parts.sort_by(|a, b| a.partial_cmp(b).unwrap());
                        parts.iter().sum()
                    })
                    .collect()
            })
            .collect()
    }

    /// Squared norm of the entries a single column loses beyond the window (closed form).
    fn column_discard_sq(&self, theta: &Coefficient, lam: SpatialIndex, delta: u8, cap: u8) -> f64 {
        let (a, b) = lam.support();
        let (ta, tb) = theta.support();
        let len = b.min(tb) - a.max(ta);
        if len <= 0.0 {
            return 0.0;
        }
        let kept = self.window_end(theta, lam.level, delta);
        let l0 = kept as u32 + 1;
        if l0 > cap as u32 {
            return 0.0;
        }
        let l = lam.level as i32;
        match *theta {
            Coefficient::Constant(_) => 0.0,
            Coefficient::Hat { .. } => {
                let s = theta.slope();
                let geo: f64 = (l0..=cap as u32).map(|k| (-2.0 * k as f64).exp2()).sum();
                len * (l as f64).exp2() * s * s / 16.0 * geo
            }
            Coefficient::Indicator { amp, .. } => {
                if theta.smooth_level().is_some() {
                    return 0.0;
                }
                let pts = [ta, tb].iter().filter(|&&x| x > a && x < b).count() as f64;
                let geo: f64 = (l0..=cap as u32).map(|k| (-(k as f64)).exp2()).sum();
                pts * pts * amp * amp * (l as f64).exp2() * geo / 4.0
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum GroupParam {
    Level(u8),
    Single(u16),
}

enum RowHit {
    Pos(usize),
    Key(SparseModeIndex),
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mean_stiffness_is_identity() {
        let b = HatBasis;
        let one = Coefficient::Constant(1.0);
        let lams = [SpatialIndex::new(0, 0), SpatialIndex::new(1, 1), SpatialIndex::new(3, 5), SpatialIndex::new(2, 2)];
        for &x in &lams {
            for &y in &lams {
                let e = stiffness_entry(&b, &one, x, y);
                let want = if x == y { 1.0 } else { 0.0 };
                assert!((e - want).abs() < 1e-14, "{x} {y}: {e}");
            }
        }
    }

    #[test]
    fn fine_hat_entries_match_closed_form() {
        let b = HatBasis;
        let theta = Coefficient::Hat { level: 1, k: 0, amp: 0.3 };
        let lam = SpatialIndex::new(1, 0);
        for mu in [SpatialIndex::new(3, 0), SpatialIndex::new(4, 2), SpatialIndex::new(4, 5)] {
            let (a, c) = mu.support();
            let m = 0.5 * (a + c);
            let dpsi = b.derivative(lam, m);
            let dtheta = if m < 0.25 { theta.slope() } else { -theta.slope() };
            let want = -dpsi * dtheta * b.integral(mu);
            assert!((stiffness_entry(&b, &theta, lam, mu) - want).abs() < 1e-15);
        }
    }
}
