//! `Φ_T` on regular loops.
//!
//! Two independent evaluators:
//! - the recursion, which moves the face areas along Makeenko–Migdal
//!   directions until the loop degenerates to a power of a simple loop and
//!   integrates the products of split-loop values along the way;
//! - the contour formula for splittable loops, a nested contour integral over
//!   one variable per simple loop of the splitting tree.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)] // unused when a dependency links std
use num_traits::Float;

use crate::loop_model::{CombinatorialLoop, FaceAreaVector, SplittableTree};
use crate::simple_field::SimpleField;
use crate::specfun::GaussLegendre;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MasterMethod {
    Recursion,
    SplittableContour,
    SimpleFormula,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MasterFieldValue {
    pub value: f64,
    pub err_est: f64,
    pub method: MasterMethod,
    /// Deepest level of nested sub-loop evaluations.
    pub depth: usize,
}

/// Straight path in area space from the given areas to a configuration
/// supported on a face of minimal and a face of maximal winding number.
#[derive(Debug, Clone, PartialEq)]
pub struct DeformationPath {
    /// One coefficient per self-intersection, in the order of `CombinatorialLoop::intersections`.
    pub alpha: Vec<f64>,
    pub v: Vec<f64>,
    pub a_start: FaceAreaVector,
    pub a_end: FaceAreaVector,
    pub n_star: i64,
    pub k0: usize,
    pub k_star: usize,
    pub a0: f64,
    pub a_star: f64,
}

/// Build the deformation path of the recursion. The areas may lie on the
/// boundary of the simplex; the path is the segment to `a_end`.
pub fn solve_deformation(l: &CombinatorialLoop, areas: &FaceAreaVector) -> Result<DeformationPath> {
    let p = l.face_count();
    if areas.len() != p {
        return Err(Error::Domain(alloc::format!("{} areas for {p} faces", areas.len())));
    }
    let n = l.winding_numbers(0)?;
    let lo = *n.iter().min().expect("faces");
    let hi = *n.iter().max().expect("faces");
    let n_star = hi - lo;
    if n_star == 0 {
        return Err(Error::DegenerateWinding);
    }
    let k0 = n.iter().position(|&x| x == lo).expect("min");
    let k_star = n.iter().position(|&x| x == hi).expect("max");
    let t = areas.total();
    let shifted: Vec<i64> = n.iter().map(|&x| x - lo).collect();
    let a_star = (areas.dot(&shifted) / n_star as f64).clamp(0.0, t);
    let a0 = t - a_star;
    let mut end = vec![0.0; p];
    end[k0] = a0;
    end[k_star] = a_star;
    let v: Vec<f64> = end.iter().zip(areas.areas()).map(|(e, a)| e - a).collect();

    let mus: Vec<Vec<f64>> = l
        .intersections()
        .iter()
        .map(|&i| l.mm_vector(i).map(|m| m.coefficients.iter().map(|&c| c as f64).collect()))
        .collect::<Result<_>>()?;
    let r = mus.len();
    let dot = |x: &[f64], y: &[f64]| x.iter().zip(y).map(|(a, b)| a * b).sum::<f64>();
    let mut gram = vec![vec![0.0; r]; r];
    let mut rhs = vec![0.0; r];
    for i in 0..r {
        for j in 0..r {
            gram[i][j] = dot(&mus[i], &mus[j]);
        }
        rhs[i] = dot(&mus[i], &v);
    }
    let alpha = solve_dense(gram, rhs)?;
    let norm_v = dot(&v, &v).sqrt();
    let mut resid = v.clone();
    for (i, mu) in mus.iter().enumerate() {
        for f in 0..p {
            resid[f] -= alpha[i] * mu[f];
        }
    }
    let norm_r = dot(&resid, &resid).sqrt();
    if norm_r > 1e-9 * norm_v + 1e-14 * t {
        return Err(Error::Solve(alloc::format!(
            "area change is not spanned by the Makeenko-Migdal vectors (residual {norm_r:e})"
        )));
    }
    Ok(DeformationPath {
        alpha,
        v,
        a_start: areas.clone(),
        a_end: FaceAreaVector::new(end)?,
        n_star,
        k0,
        k_star,
        a0,
        a_star,
    })
}

/// Gaussian elimination with partial pivoting.
fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Result<Vec<f64>> {
    let n = b.len();
    for c in 0..n {
        let piv = (c..n).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs())).expect("rows");
        if a[piv][c].abs() < 1e-12 {
            return Err(Error::Solve("Makeenko-Migdal vectors are linearly dependent".into()));
        }
        a.swap(c, piv);
        b.swap(c, piv);
        for i in c + 1..n {
            let f = a[i][c] / a[c][c];
            for k in c..n {
                a[i][k] -= f * a[c][k];
            }
            b[i] -= f * b[c];
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|k| a[i][k] * x[k]).sum();
        x[i] = (b[i] - s) / a[i][i];
    }
    Ok(x)
}

type MemoKey = (Vec<usize>, Vec<i64>);

/// Master-field evaluator for one total area `T`.
#[derive(Debug, Clone)]
pub struct MasterField {
    simple: SimpleField,
    max_depth: usize,
    tol: f64,
}

const MAX_S_NODES: usize = 1024;

impl MasterField {
    pub fn new(t: f64) -> Result<Self> {
        Ok(Self { simple: SimpleField::new(t)?, max_depth: 8, tol: 1e-12 })
    }

    pub fn with_simple_field(simple: SimpleField) -> Self {
        Self { simple, max_depth: 8, tol: 1e-12 }
    }

    /// Convergence tolerance of the path integrals.
    pub fn with_tolerance(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_max_depth(mut self, depth: usize) -> Self {
        self.max_depth = depth;
        self
    }

    pub fn t(&self) -> f64 {
        self.simple.t()
    }

    pub fn simple_field(&self) -> &SimpleField {
        &self.simple
    }

    fn check_total(&self, areas: &FaceAreaVector) -> Result<()> {
        let t = self.t();
        if (areas.total() - t).abs() > 1e-10 * t.max(1.0) {
            return Err(Error::Domain(alloc::format!("areas sum to {}, expected T = {t}", areas.total())));
        }
        Ok(())
    }

    /// `φ_T(n, a, T − a)`. Quadrature is a few hundred times cheaper than the
    /// contour, so the contour is used only once quadrature loses three digits.
    fn simple_power(&self, n: i64, a: f64) -> Result<f64> {
        let t = self.t();
        if a <= 0.0 || a >= t {
            return Ok(1.0);
        }
        let q = self.simple.quadrature_condition(n, a);
        if q > 1e3 && self.simple.contour_condition(n, a) < q {
            self.simple.contour_phi(n, a)
        } else {
            self.simple.phi(n, a)
        }
    }

    /// `Φ_T` by the recursion.
    pub fn value(&self, l: &CombinatorialLoop, areas: &FaceAreaVector) -> Result<MasterFieldValue> {
        self.check_total(areas)?;
        if areas.len() != l.face_count() {
            return Err(Error::Domain(alloc::format!("{} areas for {} faces", areas.len(), l.face_count())));
        }
        let mut memo = BTreeMap::new();
        self.eval(l, areas, 0, &mut memo)
    }

    fn eval(
        &self,
        l: &CombinatorialLoop,
        areas: &FaceAreaVector,
        depth: usize,
        memo: &mut BTreeMap<MemoKey, MasterFieldValue>,
    ) -> Result<MasterFieldValue> {
        if depth > self.max_depth {
            return Err(Error::Budget(alloc::format!("recursion deeper than {}", self.max_depth)));
        }
        if l.n_self() == 0 {
            let inside = areas.areas()[l.graph().left[0]];
            return Ok(MasterFieldValue {
                value: self.simple_power(1, inside)?,
                err_est: 1e-13,
                method: MasterMethod::SimpleFormula,
                depth,
            });
        }
        let (canon, relabel) = l.canonical_with_relabelling();
        let a = areas.permuted(&relabel.face);
        let g = canon.graph();
        let key_loop: Vec<usize> = g.source.iter().chain(&g.target).chain(&g.left).chain(&g.right).copied().collect();
        let key_areas: Vec<i64> = a.areas().iter().map(|x| (x * 1e12).round() as i64).collect();
        let key = (key_loop, key_areas);
        if let Some(v) = memo.get(&key) {
            return Ok(MasterFieldValue { depth: v.depth.max(depth), ..*v });
        }
        let path = match solve_deformation(&canon, &a) {
            Ok(p) => p,
            Err(Error::DegenerateWinding) => {
                return Ok(MasterFieldValue { value: 1.0, err_est: 0.0, method: MasterMethod::Recursion, depth })
            }
            Err(e) => return Err(e),
        };
        let boundary = self.simple_power(path.n_star, path.a0)?;
        let splits = canon
            .intersections()
            .iter()
            .map(|&v| canon.split(v))
            .collect::<Result<Vec<_>>>()?;

        let mut total = 0.0;
        let mut err = 1e-13;
        let mut deepest = depth;
        for (i, split) in splits.iter().enumerate() {
            let alpha = path.alpha[i];
            if alpha.abs() < 1e-15 {
                continue;
            }
            let mut integrand = |s: f64, memo: &mut BTreeMap<MemoKey, MasterFieldValue>| -> Result<(f64, f64)> {
                let pts: Vec<f64> = a.areas().iter().zip(&path.v).map(|(x, dv)| (x + s * dv).max(0.0)).collect();
                let at = FaceAreaVector::new(pts)?;
                let u = self.eval(&split.sub_loops[0], &at.push_forward(&split.face_maps[0]), depth + 1, memo)?;
                let w = self.eval(&split.sub_loops[1], &at.push_forward(&split.face_maps[1]), depth + 1, memo)?;
                deepest = deepest.max(u.depth).max(w.depth);
                Ok((u.value * w.value, u.value.abs() * w.err_est + w.value.abs() * u.err_est))
            };
            let mut nodes = 8;
            let mut prev = f64::NAN;
            let (integral, child_err, diff) = loop {
                let gl = GaussLegendre::new(nodes);
                let mut acc = 0.0;
                let mut child = 0.0f64;
                for (s, w) in gl.on_interval(0.0, 1.0) {
                    let (val, e) = integrand(s, memo)?;
                    acc += w * val;
                    child = child.max(e);
                }
                let diff = (acc - prev).abs();
                if diff <= self.tol * acc.abs().max(1.0) {
                    break (acc, child, diff);
                }
                if 2 * nodes > MAX_S_NODES {
                    return Err(Error::NoConvergence(alloc::format!(
                        "path integral at vertex {} did not converge (last change {diff:e})",
                        split.vertex
                    )));
                }
                prev = acc;
                nodes *= 2;
            };
            total += alpha * integral;
            err += alpha.abs() * (diff + child_err);
        }
        let out = MasterFieldValue { value: boundary - total, err_est: err, method: MasterMethod::Recursion, depth: deepest };
        memo.insert(key, out);
        Ok(out)
    }

    /// Central-difference defect of the Makeenko–Migdal equation at the
    /// self-intersection `v`: `|(Φ(a + hμ) − Φ(a − hμ))/2h − Φ(l_v)Φ(l̂_v)|`.
    pub fn mm_residual(&self, l: &CombinatorialLoop, areas: &FaceAreaVector, v: usize, h: f64) -> Result<f64> {
        if l.n_self() == 0 {
            return Err(Error::Domain("a simple loop has no Makeenko-Migdal equation".into()));
        }
        let mu = l.mm_vector(v)?;
        let step = |sign: f64| -> Result<FaceAreaVector> {
            let pts: Vec<f64> = areas.areas().iter().zip(&mu.coefficients).map(|(a, &c)| a + sign * h * c as f64).collect();
            if pts.iter().any(|&x| x < 0.0) {
                return Err(Error::Domain("stepped areas leave the simplex".into()));
            }
            FaceAreaVector::new(pts)
        };
        let plus = self.value(l, &step(1.0)?)?.value;
        let minus = self.value(l, &step(-1.0)?)?.value;
        let split = l.split(v)?;
        let u = self.value(&split.sub_loops[0], &areas.push_forward(&split.face_maps[0]))?.value;
        let w = self.value(&split.sub_loops[1], &areas.push_forward(&split.face_maps[1]))?.value;
        Ok(((plus - minus) / (2.0 * h) - u * w).abs())
    }

    /// `Φ_T` by the nested contour formula over the splitting tree, with
    /// `k` the distinguished face.
    pub fn splittable_contour_value(&self, l: &CombinatorialLoop, areas: &FaceAreaVector, k: usize) -> Result<MasterFieldValue> {
        self.check_total(areas)?;
        if l.n_self() > 3 {
            return Err(Error::Guard(alloc::format!("contour formula limited to 3 self-intersections, loop has {}", l.n_self())));
        }
        let tree = l.splittable_tree(k)?.ok_or(Error::NotSplittable)?;
        let radii = contour_radii(&tree, self.simple.equilibrium().beta);
        self.splittable_contour_with_radii(&tree, areas, &radii)
    }

    /// [`Self::splittable_contour_value`] with explicit circle radii per simple loop.
    pub fn splittable_contour_with_radii(
        &self,
        tree: &SplittableTree,
        areas: &FaceAreaVector,
        radii: &[f64],
    ) -> Result<MasterFieldValue> {
        let nloops = tree.simple_loops.len();
        let beta = self.simple.equilibrium().beta;
        if radii.len() != nloops || radii.iter().any(|&r| !(r > beta)) {
            return Err(Error::Domain("each simple loop needs a contour radius larger than beta".into()));
        }
        let pairing: Vec<f64> = tree.windings.iter().map(|w| areas.dot(w)).collect();

        // parent of each loop in the adapted order, with the sign of its pole factor
        let order = &tree.adapted_order;
        let mut parent: Vec<Option<(usize, f64)>> = vec![None; nloops];
        for &(_, jl, jr) in &tree.crossing_map {
            let (pj, cj) = if order.iter().position(|&x| x == jl) < order.iter().position(|&x| x == jr) {
                (jl, jr)
            } else {
                (jr, jl)
            };
            // factor 1/(z_r − z_l) written as sign/(z_child − z_parent)
            let sign = if cj == jr { 1.0 } else { -1.0 };
            parent[cj] = Some((pj, sign));
        }

        let mut prev = f64::NAN;
        let mut nodes = 32;
        loop {
            let mut z = Vec::with_capacity(nloops);
            let mut f = Vec::with_capacity(nloops);
            for j in 0..nloops {
                let zs: Vec<Complex64> = (0..nodes)
                    .map(|m| Complex64::from_polar(radii[j], core::f64::consts::TAU * m as f64 / nodes as f64))
                    .collect();
                let eps = tree.eps[j] as f64;
                let fs = zs
                    .iter()
                    .map(|&zz| {
                        let gz = self.simple.equilibrium().stieltjes(zz)?;
                        // trapezoid weight for (1/2πi)∮ with orientation ε_j: ε_j z/M
                        Ok((zz * pairing[j] + gz * eps).exp() * zz * (eps / nodes as f64))
                    })
                    .collect::<Result<Vec<_>>>()?;
                z.push(zs);
                f.push(fs);
            }
            // leaves first: fold each loop's weights into its parent
            for &j in order.iter().rev() {
                let Some((pj, sign)) = parent[j] else { continue };
                let msg: Vec<Complex64> = z[pj]
                    .iter()
                    .map(|&zp| f[j].iter().zip(&z[j]).map(|(&w, &zc)| w * sign / (zc - zp)).sum())
                    .collect();
                for (fp, mm) in f[pj].iter_mut().zip(msg) {
                    *fp *= mm;
                }
            }
            let value: Complex64 = f[order[0]].iter().sum();
            let diff = (value.re - prev).abs();
            if diff <= 1e-13 * value.re.abs().max(1.0) || (nodes >= 4096 && diff <= 1e-9) {
                return Ok(MasterFieldValue {
                    value: value.re,
                    err_est: diff.max(value.im.abs()),
                    method: MasterMethod::SplittableContour,
                    depth: 0,
                });
            }
            if nodes >= 4096 {
                return Err(Error::NoConvergence(alloc::format!("nested contour integral (last change {diff:e})")));
            }
            prev = value.re;
            nodes *= 2;
        }
    }
}

/// Circles `β + 0.3 + 0.4·rank`, with `rank` the position in the adapted order.
pub fn contour_radii(tree: &SplittableTree, beta: f64) -> Vec<f64> {
    let mut radii = vec![0.0; tree.simple_loops.len()];
    for (rank, &j) in tree.adapted_order.iter().enumerate() {
        radii[j] = beta + 0.3 + 0.4 * rank as f64;
    }
    radii
}

/// Recursion value of `Φ_T` with `T` the total of `areas`.
pub fn master_field(l: &CombinatorialLoop, areas: &FaceAreaVector) -> Result<MasterFieldValue> {
    MasterField::new(areas.total())?.value(l, areas)
}

pub fn mm_residual(l: &CombinatorialLoop, areas: &FaceAreaVector, v: usize, h: f64) -> Result<f64> {
    MasterField::new(areas.total())?.mm_residual(l, areas, v, h)
}

pub fn splittable_contour_value(l: &CombinatorialLoop, areas: &FaceAreaVector, k: usize) -> Result<MasterFieldValue> {
    MasterField::new(areas.total())?.splittable_contour_value(l, areas, k)
}
