//! Independent verification oracles.
//!
//! These deliberately avoid the counting machinery: the component
//! oracle rasterizes the workspace torus and counts connected clusters
//! of cells whose center satisfies the telescopic constraint, refining
//! the resolution until the count stabilizes; the subset table is a
//! direct classification dump for small n.

use crate::error::{Error, Result};
use crate::linkage::{min_abs_signed_sum, LengthVector, SubsetClass, ENUM_CAP};
use crate::scalar::QuadraticScalar;

/// Workspace function at torus angles (the first fixed leg is gauge
/// fixed at angle zero): minus the squared distance of the fixed-chain
/// endpoint from the origin. The configuration is admissible when
/// f >= -telescopic^2.
pub fn f_value(lv: &LengthVector, angles: &[f64]) -> Result<f64> {
    let n = lv.n();
    if angles.len() != n - 2 {
        return Err(Error::OutOfRange {
            param: "angles",
            value: angles.len().to_string(),
            range: format!("exactly n - 2 = {} angles", n - 2),
        });
    }
    let legs: Vec<f64> = lv.legs().iter().map(|l| l.to_f64()).collect();
    let mut x = legs[0];
    let mut y = 0.0;
    for (i, theta) in angles.iter().enumerate() {
        x += legs[i + 1] * theta.cos();
        y += legs[i + 1] * theta.sin();
    }
    Ok(-(x * x + y * y))
}

pub const MAX_GRID_DIMS: usize = 4;
const MAX_GRID_CELLS: u128 = 100_000_000;
pub const MIN_RESOLUTION: usize = 16;

#[derive(Clone, Debug)]
pub struct GridConfig {
    /// Cells per torus axis at the coarsest pass.
    pub resolution: usize,
    /// Number of resolution doublings to try beyond the base pass.
    pub rounds: usize,
    /// Smallest acceptable genericity margin; defaults to
    /// 2*pi*max(length)/resolution when absent.
    pub margin_threshold: Option<f64>,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            resolution: 48,
            rounds: 1,
            margin_threshold: None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct GridOutcome {
    /// The stabilized component count.
    pub components: usize,
    pub resolutions: Vec<usize>,
    pub counts: Vec<usize>,
}

/// Counts connected components of the admissible region by flood-filling
/// grid cells on the (n-2)-torus, doubling the resolution until two
/// consecutive counts agree. A margin below the threshold or a count
/// that never stabilizes is an error, never a silent guess.
pub fn grid_b0(lv: &LengthVector, cfg: &GridConfig) -> Result<GridOutcome> {
    let dims = lv.n() - 2;
    if dims > MAX_GRID_DIMS {
        return Err(Error::Capacity(format!(
            "grid oracle supports n - 2 <= {MAX_GRID_DIMS} torus dimensions, got {dims}"
        )));
    }
    if cfg.resolution < MIN_RESOLUTION {
        return Err(Error::OutOfRange {
            param: "resolution",
            value: cfg.resolution.to_string(),
            range: format!(">= {MIN_RESOLUTION} cells per axis"),
        });
    }
    if cfg.rounds < 1 {
        return Err(Error::OutOfRange {
            param: "rounds",
            value: cfg.rounds.to_string(),
            range: ">= 1 refinement round".into(),
        });
    }

    let legs: Vec<f64> = lv.legs().iter().map(|l| l.to_f64()).collect();
    let max_leg = legs.iter().cloned().fold(0.0f64, f64::max);
    let margin_info = min_abs_signed_sum(lv.legs())?;
    let margin = if margin_info.has_zero {
        0.0
    } else {
        margin_info.min_nonzero.to_f64()
    };
    let threshold = cfg
        .margin_threshold
        .unwrap_or(2.0 * std::f64::consts::PI * max_leg / cfg.resolution as f64);
    if margin < threshold {
        return Err(Error::GridMargin { margin, threshold });
    }

    let tel = legs[lv.n() - 1];
    let fixed = &legs[..lv.n() - 1];
    let mut resolutions = Vec::new();
    let mut counts = Vec::new();
    for round in 0..=cfg.rounds {
        let res = cfg.resolution << round;
        let cells = (res as u128).pow(dims as u32);
        if cells > MAX_GRID_CELLS {
            return Err(Error::Capacity(format!(
                "grid at resolution {res}^{dims} needs {cells} cells (limit {MAX_GRID_CELLS})"
            )));
        }
        let count = components_at(fixed, tel, res, dims);
        resolutions.push(res);
        counts.push(count);
        if counts.len() >= 2 && counts[counts.len() - 1] == counts[counts.len() - 2] {
            return Ok(GridOutcome {
                components: count,
                resolutions,
                counts,
            });
        }
    }
    Err(Error::Inconclusive {
        resolutions,
        counts,
    })
}

/// One rasterization pass: membership bitmap, then union-find over the
/// members with periodic face adjacency.
fn components_at(fixed: &[f64], tel: f64, res: usize, dims: usize) -> usize {
    let tables: Vec<Vec<(f64, f64)>> = fixed[1..]
        .iter()
        .map(|&len| {
            (0..res)
                .map(|j| {
                    let theta = 2.0 * std::f64::consts::PI * (j as f64 + 0.5) / res as f64;
                    (len * theta.cos(), len * theta.sin())
                })
                .collect()
        })
        .collect();
    let cells = res.pow(dims as u32);
    let limit = tel * tel;
    let mut member = vec![0u64; cells / 64 + 1];

    // depth-first over axes keeps partial chain sums incremental
    #[allow(clippy::too_many_arguments)]
    fn fill(
        axis: usize,
        x: f64,
        y: f64,
        base: usize,
        tables: &[Vec<(f64, f64)>],
        res: usize,
        limit: f64,
        member: &mut [u64],
    ) {
        let table = &tables[axis];
        if axis + 1 == tables.len() {
            for (j, &(dx, dy)) in table.iter().enumerate() {
                let cx = x + dx;
                let cy = y + dy;
                if cx * cx + cy * cy <= limit {
                    let idx = base + j;
                    member[idx / 64] |= 1 << (idx % 64);
                }
            }
        } else {
            for (j, &(dx, dy)) in table.iter().enumerate() {
                fill(
                    axis + 1,
                    x + dx,
                    y + dy,
                    (base + j) * res,
                    tables,
                    res,
                    limit,
                    member,
                );
            }
        }
    }
    fill(0, fixed[0], 0.0, 0, &tables, res, limit, &mut member);

    // rank of each member cell among members, via block prefix counts
    let words = member.len();
    let mut prefix = vec![0u32; words + 1];
    for w in 0..words {
        prefix[w + 1] = prefix[w] + member[w].count_ones();
    }
    let members = prefix[words] as usize;
    if members == 0 {
        return 0;
    }
    let rank = |idx: usize| -> usize {
        let w = idx / 64;
        let within = (member[w] & ((1u64 << (idx % 64)) - 1)).count_ones();
        (prefix[w] + within) as usize
    };
    let is_member = |idx: usize| member[idx / 64] >> (idx % 64) & 1 == 1;

    let mut uf = UnionFind::new(members);
    let mut strides = vec![1usize; dims];
    for a in (0..dims.saturating_sub(1)).rev() {
        strides[a] = strides[a + 1] * res;
    }
    let mut components = members;
    for (w, &word) in member.iter().enumerate() {
        let mut bits = word;
        while bits != 0 {
            let idx = w * 64 + bits.trailing_zeros() as usize;
            bits &= bits - 1;
            let me = rank(idx);
            let mut rem = idx;
            for &stride in &strides {
                let coord = rem / stride;
                rem %= stride;
                let neighbor = if coord + 1 < res {
                    idx + stride
                } else {
                    idx - (res - 1) * stride
                };
                if is_member(neighbor) && uf.union(me, rank(neighbor)) {
                    components -= 1;
                }
            }
        }
    }
    components
}

struct UnionFind {
    parent: Vec<u32>,
    size: Vec<u32>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n as u32).collect(),
            size: vec![1; n],
        }
    }

    fn find(&mut self, mut i: u32) -> u32 {
        while self.parent[i as usize] != i {
            self.parent[i as usize] = self.parent[self.parent[i as usize] as usize];
            i = self.parent[i as usize];
        }
        i
    }

    /// True when two components were merged.
    fn union(&mut self, a: usize, b: usize) -> bool {
        let mut ra = self.find(a as u32);
        let mut rb = self.find(b as u32);
        if ra == rb {
            return false;
        }
        if self.size[ra as usize] < self.size[rb as usize] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb as usize] = ra;
        self.size[ra as usize] += self.size[rb as usize];
        true
    }
}

#[derive(Clone, Debug)]
pub struct SubsetRow {
    /// Bit i set means leg i belongs to the subset.
    pub mask: u32,
    pub size: usize,
    pub sum: QuadraticScalar,
    pub class: SubsetClass,
}

/// Streams the classification of every one of the 2^n subsets in
/// ascending mask order. Sums update exactly in O(1) per step.
pub fn enum_subsets_foreach(
    lv: &LengthVector,
    mut f: impl FnMut(&SubsetRow),
) -> Result<()> {
    let n = lv.n();
    if n > ENUM_CAP {
        return Err(Error::EnumerationCap { n, cap: ENUM_CAP });
    }
    let legs = lv.legs();
    let total = lv.total();
    let two = crate::scalar::Rational::new(2.into(), 1.into());
    // prefix[t] = sum of legs 0..t, so mask -> mask+1 (clearing a run of
    // low ones, setting bit t) updates the sum by leg[t] - prefix[t]
    let mut prefix = vec![QuadraticScalar::zero()];
    for leg in legs {
        prefix.push(prefix.last().unwrap().add(leg).expect("validated radicands"));
    }
    let mut sum = QuadraticScalar::zero();
    let classify = |mask: u32, sum: &QuadraticScalar, f: &mut dyn FnMut(&SubsetRow)| {
        let class = match sum.scale(&two).sub(&total).expect("validated radicands").sign() {
            s if s < 0 => SubsetClass::Short,
            0 => SubsetClass::Median,
            _ => SubsetClass::Long,
        };
        f(&SubsetRow {
            mask,
            size: mask.count_ones() as usize,
            sum: sum.clone(),
            class,
        });
    };
    classify(0, &sum, &mut f);
    for mask in 1..(1u32 << n) {
        let t = mask.trailing_zeros() as usize;
        sum = sum
            .add(&legs[t])
            .and_then(|s| s.sub(&prefix[t]))
            .expect("validated radicands");
        classify(mask, &sum, &mut f);
    }
    Ok(())
}

/// Materialized subset table; memory grows as 2^n.
pub fn enum_subsets(lv: &LengthVector) -> Result<Vec<SubsetRow>> {
    let mut rows = Vec::new();
    enum_subsets_foreach(lv, |row| rows.push(row.clone()))?;
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lv(spec: &str) -> LengthVector {
        LengthVector::parse(spec).unwrap()
    }

    #[test]
    fn f_value_on_known_configurations() {
        let v = lv("1,1,1,2");
        // chain fully stretched: endpoint at distance 3
        let f = f_value(&v, &[0.0, 0.0]).unwrap();
        assert!((f + 9.0).abs() < 1e-12);
        // equilateral fold: 1 + e^{2pi i/3} + e^{-2pi i/3} = 0
        let t = 2.0 * std::f64::consts::PI / 3.0;
        let f = f_value(&v, &[t, -t]).unwrap();
        assert!(f.abs() < 1e-12);
        assert!(f_value(&v, &[0.0]).is_err());
    }

    #[test]
    fn grid_counts_match_known_spaces() {
        let two_triangles = grid_b0(
            &lv("1,1,1,1/2"),
            &GridConfig {
                resolution: 48,
                rounds: 2,
                margin_threshold: None,
            },
        )
        .unwrap();
        assert_eq!(two_triangles.components, 2);

        let torus_minus_disk = grid_b0(&lv("1,1,1,2"), &GridConfig::default()).unwrap();
        assert_eq!(torus_minus_disk.components, 1);

        let split = grid_b0(
            &lv("1,1,5/4,5/4,1"),
            &GridConfig {
                resolution: 32,
                rounds: 2,
                margin_threshold: None,
            },
        )
        .unwrap();
        let profile =
            crate::betti::profile_with_engine(&lv("1,1,5/4,5/4,1"), crate::betti::Engine::Auto)
                .unwrap();
        assert_eq!(
            num_bigint::BigUint::from(split.components),
            profile.b[0]
        );
    }

    #[test]
    fn grid_rejects_thin_margins() {
        // margin 0: non-generic vector
        let err = grid_b0(&lv("1,1,1,1"), &GridConfig::default()).unwrap_err();
        assert!(matches!(err, Error::GridMargin { .. }));
        // explicit threshold above the actual margin
        let err = grid_b0(
            &lv("1,1,1,2"),
            &GridConfig {
                resolution: 48,
                rounds: 1,
                margin_threshold: Some(5.0),
            },
        )
        .unwrap_err();
        assert!(matches!(err, Error::GridMargin { .. }));
    }

    #[test]
    fn grid_guards_capacity() {
        let err = grid_b0(
            &lv("1,1,1,1,1,1,1,5/2"),
            &GridConfig::default(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::Capacity(_)));

        let err = grid_b0(
            &lv("1,1,1,1,1,5/2"),
            &GridConfig {
                resolution: 128,
                rounds: 2,
                margin_threshold: Some(0.0),
            },
        )
        .unwrap_err();
        assert!(matches!(err, Error::Capacity(_)), "{err}");
    }

    #[test]
    fn subset_table_is_complete_and_dual() {
        let v = lv("1,1,1,2");
        let rows = enum_subsets(&v).unwrap();
        assert_eq!(rows.len(), 16);
        assert_eq!(rows[0].mask, 0);
        assert!(rows[0].sum.is_rational());
        assert_eq!(rows[0].class, SubsetClass::Short);
        let full = &rows[15];
        assert_eq!(full.class, SubsetClass::Long);
        assert_eq!(full.sum, v.total());
        // complement duality: short <-> long, median <-> median
        for row in &rows {
            let comp = &rows[(!row.mask & 15) as usize];
            match row.class {
                SubsetClass::Short => assert_eq!(comp.class, SubsetClass::Long),
                SubsetClass::Long => assert_eq!(comp.class, SubsetClass::Short),
                SubsetClass::Median => assert_eq!(comp.class, SubsetClass::Median),
            }
            let merged = row.sum.add(&comp.sum).unwrap();
            assert_eq!(merged, v.total());
        }
        // masks arrive in ascending order
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.mask as usize, i);
        }
    }

    #[test]
    fn subset_table_handles_irrational_legs() {
        let v = lv("1,1,1,sqrt(2)");
        let rows = enum_subsets(&v).unwrap();
        assert_eq!(rows.len(), 16);
        let sqrt2_only = &rows[0b1000];
        assert!(!sqrt2_only.sum.is_rational());
        assert_eq!(sqrt2_only.class, SubsetClass::Short);
        assert!(rows.iter().all(|r| r.class != SubsetClass::Median));
    }
}
