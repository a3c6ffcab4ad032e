//! Polynomial roots by the Aberth–Ehrlich iteration, clustering of nearby
//! roots into multiple roots, and Newton polishing.

use num_complex::Complex64;

const MAX_ITERATIONS: usize = 2000;

/// All complex roots of `sum coeffs[k] z^k`, trailing zero coefficients
/// ignored. Returns an empty list for constants.
pub fn aberth(coeffs: &[Complex64]) -> Vec<Complex64> {
    let Some(top) = coeffs.iter().rposition(|c| c.norm() != 0.0) else {
        return Vec::new();
    };
    let low = coeffs.iter().position(|c| c.norm() != 0.0).unwrap_or(0);
    let poly = &coeffs[low..=top];
    let mut roots = vec![Complex64::new(0.0, 0.0); low];
    if poly.len() < 2 {
        return roots;
    }
    if poly.len() == 2 {
        roots.push(-poly[0] / poly[1]);
        return roots;
    }

    let mut z = initial_guesses(poly);
    let mut done = vec![false; z.len()];
    for _ in 0..MAX_ITERATIONS {
        let mut all_done = true;
        for i in 0..z.len() {
            if done[i] {
                continue;
            }
            let ratio = newton_ratio(poly, z[i]);
            let repulsion: Complex64 = z
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, &zj)| (z[i] - zj).inv())
                .sum();
            let denom = Complex64::new(1.0, 0.0) - ratio * repulsion;
            let step = if denom.norm() == 0.0 {
                ratio
            } else {
                ratio / denom
            };
            if !step.re.is_finite() || !step.im.is_finite() {
                done[i] = true;
                continue;
            }
            z[i] -= step;
            if step.norm() <= 1e-15 * z[i].norm().max(f64::MIN_POSITIVE) {
                done[i] = true;
            } else {
                all_done = false;
            }
        }
        if all_done {
            break;
        }
    }
    roots.extend(z);
    roots
}

/// `p(z) / p'(z)`, evaluated through the reversed polynomial outside the unit
/// disk so that large roots do not overflow.
fn newton_ratio(poly: &[Complex64], z: Complex64) -> Complex64 {
    if z.norm() <= 1.0 {
        let (p, dp) = horner_with_derivative(poly, z);
        return p / dp;
    }
    // p(z) = z^d q(1/z); p'/p = y (d - y q'(y)/q(y)) with y = 1/z
    let d = (poly.len() - 1) as f64;
    let y = z.inv();
    let reversed: Vec<Complex64> = poly.iter().rev().copied().collect();
    let (q, dq) = horner_with_derivative(&reversed, y);
    let log_derivative = y * (Complex64::new(d, 0.0) - y * dq / q);
    log_derivative.inv()
}

fn horner_with_derivative(poly: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for &c in poly.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

/// Starting points on circles whose radii come from the upper convex hull of
/// `(k, log|c_k|)` (the Newton polygon).
fn initial_guesses(poly: &[Complex64]) -> Vec<Complex64> {
    let points: Vec<(usize, f64)> = poly
        .iter()
        .enumerate()
        .filter(|(_, c)| c.norm() > 0.0)
        .map(|(k, c)| (k, c.norm().ln()))
        .collect();
    let mut hull: Vec<(usize, f64)> = Vec::new();
    for &pt in &points {
        while hull.len() >= 2 {
            let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            let cross =
                (b.0 as f64 - a.0 as f64) * (pt.1 - a.1) - (b.1 - a.1) * (pt.0 as f64 - a.0 as f64);
            if cross >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(pt);
    }
    let mut guesses = Vec::with_capacity(poly.len() - 1);
    for (seg, w) in hull.windows(2).enumerate() {
        let (k0, l0) = w[0];
        let (k1, l1) = w[1];
        let count = k1 - k0;
        let radius = ((l0 - l1) / count as f64).exp();
        for t in 0..count {
            let angle = std::f64::consts::TAU * t as f64 / count as f64 + 0.4 + 1.1 * seg as f64;
            guesses.push(Complex64::from_polar(radius, angle));
        }
    }
    guesses
}

/// A group of raw roots lying within the clustering tolerance of each other.
#[derive(Debug, Clone, PartialEq)]
pub struct RootCluster {
    pub center: Complex64,
    pub members: Vec<Complex64>,
}

impl RootCluster {
    pub fn multiplicity(&self) -> usize {
        self.members.len()
    }
}

/// Single-linkage clustering: roots `a`, `b` are linked when
/// `|a - b| <= tol * (1 + |a|)`.
pub fn cluster(roots: &[Complex64], tol: f64) -> Vec<RootCluster> {
    let n = roots.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for i in 0..n {
        for j in i + 1..n {
            let scale = 1.0 + roots[i].norm().min(roots[j].norm());
            if (roots[i] - roots[j]).norm() <= tol * scale {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut groups: Vec<(usize, Vec<Complex64>)> = Vec::new();
    for (i, &z) in roots.iter().enumerate() {
        let r = find(&mut parent, i);
        match groups.iter_mut().find(|(root, _)| *root == r) {
            Some((_, members)) => members.push(z),
            None => groups.push((r, vec![z])),
        }
    }
    groups
        .into_iter()
        .map(|(_, members)| {
            let center = members.iter().sum::<Complex64>() / members.len() as f64;
            RootCluster { center, members }
        })
        .collect()
}

/// Newton iteration for a root of `sum coeffs[k] z^k` starting at `start`.
pub fn newton_polish(coeffs: &[Complex64], start: Complex64) -> Complex64 {
    let mut z = start;
    for _ in 0..100 {
        let (p, dp) = horner_with_derivative(coeffs, z);
        if dp.norm() == 0.0 {
            break;
        }
        let step = p / dp;
        if !step.re.is_finite() || !step.im.is_finite() {
            break;
        }
        z -= step;
        if step.norm() <= 4.0 * f64::EPSILON * (1.0 + z.norm()) {
            break;
        }
    }
    z
}
