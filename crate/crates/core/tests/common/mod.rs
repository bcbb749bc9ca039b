#![allow(dead_code)]

use std::cmp::Ordering;
use std::f64::consts::PI;

use dynvo::features::{Keypoint, Origin};
use dynvo::masking::BinaryMask;
use dynvo::{BoundingBox, Point2};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Adaptive Simpson quadrature of `f` on `[a, b]`.
pub fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    fn rec<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            left + right + delta / 15.0
        } else {
            rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
                + rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
        }
    }
    let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    rec(f, a, b, fa, fm, fb, whole, tol, 50)
}

/// `2/sqrt(pi) * integral_0^x exp(-t^2) dt` by quadrature.
pub fn erf_oracle(x: f64) -> f64 {
    let g = |t: f64| 2.0 / PI.sqrt() * (-t * t).exp();
    if x >= 0.0 {
        simpson(&g, 0.0, x, 1e-14)
    } else {
        -simpson(&g, 0.0, -x, 1e-14)
    }
}

pub fn median(v: &[f64]) -> f64 {
    let mut v = v.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..=p.len() {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

/// Minimum over all injective maps from the smaller side into the larger.
pub fn brute_force_min(cost: &[Vec<f64>]) -> f64 {
    let (rows, cols) = (cost.len(), cost[0].len());
    let big = rows.max(cols);
    permutations(big)
        .into_iter()
        .map(|p| {
            (0..big)
                .filter(|&i| i < rows && p[i] < cols)
                .map(|i| cost[i][p[i]])
                .sum::<f64>()
        })
        .fold(f64::INFINITY, f64::min)
}

pub fn assignment_cost(cost: &[Vec<f64>], pairs: &[(usize, usize)]) -> f64 {
    pairs.iter().map(|&(r, c)| cost[r][c]).sum()
}

pub fn assert_matching(pairs: &[(usize, usize)], rows: usize, cols: usize) {
    assert_eq!(pairs.len(), rows.min(cols));
    let mut rs: Vec<usize> = pairs.iter().map(|p| p.0).collect();
    let mut cs: Vec<usize> = pairs.iter().map(|p| p.1).collect();
    rs.sort_unstable();
    cs.sort_unstable();
    rs.dedup();
    cs.dedup();
    assert_eq!(rs.len(), pairs.len());
    assert_eq!(cs.len(), pairs.len());
}

/// Offsets `(dx, dy)` with `dx^2 + dy^2 <= r^2`.
pub fn disk_offsets(r: i64) -> Vec<(i64, i64)> {
    let mut v = Vec::new();
    for dy in -r..=r {
        for dx in -r..=r {
            if dx * dx + dy * dy <= r * r {
                v.push((dx, dy));
            }
        }
    }
    v
}

pub fn pixel(m: &BinaryMask, x: i64, y: i64) -> bool {
    x >= 0 && y >= 0 && (x as usize) < m.width() && (y as usize) < m.height() && m.at(x as usize, y as usize)
}

pub fn erode_oracle(m: &BinaryMask, r: i64) -> BinaryMask {
    let off = disk_offsets(r);
    BinaryMask::from_fn(m.width(), m.height(), |x, y| {
        off.iter().all(|&(dx, dy)| pixel(m, x as i64 + dx, y as i64 + dy))
    })
}

pub fn dilate_oracle(m: &BinaryMask, r: i64) -> BinaryMask {
    let off = disk_offsets(r);
    BinaryMask::from_fn(m.width(), m.height(), |x, y| {
        off.iter().any(|&(dx, dy)| pixel(m, x as i64 - dx, y as i64 - dy))
    })
}

pub fn random_mask(rng: &mut ChaCha8Rng) -> BinaryMask {
    let (w, h) = (rng.gen_range(1..=64), rng.gen_range(1..=64));
    let mut m = BinaryMask::new(w, h);
    match rng.gen_range(0..3) {
        0 => {
            let p = rng.gen_range(0.05..0.95);
            for y in 0..h {
                for x in 0..w {
                    if rng.gen_bool(p) {
                        m.set(x, y, true);
                    }
                }
            }
        }
        _ => {
            for _ in 0..rng.gen_range(1..6) {
                let b = BoundingBox::new(rng.gen_range(0.0..w as f64), rng.gen_range(0.0..h as f64), rng.gen_range(1.0..30.0), rng.gen_range(1.0..30.0));
                m.fill_box(&b);
            }
            for _ in 0..rng.gen_range(0..20) {
                let (x, y) = (rng.gen_range(0..w), rng.gen_range(0..h));
                m.set(x, y, !m.at(x, y));
            }
        }
    }
    m
}

pub fn kp(id: u64, x: f64, y: f64, response: f64) -> Keypoint {
    Keypoint { id, position: Point2::new(x, y), response, origin: Origin::Static(id) }
}

/// Quadratic-scan reference: radius to the nearest strictly stronger point,
/// ranking by (radius desc, response desc, x asc, y asc, id asc), top
/// `n_max`, then a greedy spacing pass.
pub fn anms_oracle(candidates: &[Keypoint], n_max: usize, d_min: f64, mask: &BinaryMask) -> Vec<Keypoint> {
    let pool: Vec<Keypoint> = candidates.iter().filter(|k| !mask.contains(&k.position)).copied().collect();
    let mut scored: Vec<(Option<f64>, Keypoint)> = pool
        .iter()
        .map(|k| {
            let mut best: Option<f64> = None;
            for o in &pool {
                if o.response > k.response {
                    let d = ((o.position.x - k.position.x).powi(2) + (o.position.y - k.position.y).powi(2)).sqrt();
                    best = Some(best.map_or(d, |b: f64| b.min(d)));
                }
            }
            (best, *k)
        })
        .collect();
    scored.sort_by(|(ra, a), (rb, b)| {
        let by_radius = match (ra, rb) {
            (None, None) => Ordering::Equal,
            (None, Some(_)) => Ordering::Less,
            (Some(_), None) => Ordering::Greater,
            (Some(x), Some(y)) => y.partial_cmp(x).unwrap(),
        };
        by_radius
            .then(b.response.partial_cmp(&a.response).unwrap())
            .then(a.position.x.partial_cmp(&b.position.x).unwrap())
            .then(a.position.y.partial_cmp(&b.position.y).unwrap())
            .then(a.id.cmp(&b.id))
    });
    let mut kept: Vec<Keypoint> = Vec::new();
    for (_, k) in scored.into_iter().take(n_max) {
        if kept.iter().all(|q| ((q.position.x - k.position.x).powi(2) + (q.position.y - k.position.y).powi(2)).sqrt() >= d_min) {
            kept.push(k);
        }
    }
    kept
}

pub fn random_candidates(rng: &mut ChaCha8Rng, n: usize, w: f64, h: f64) -> Vec<Keypoint> {
    let coarse = rng.gen_bool(0.5);
    (0..n)
        .map(|i| {
            // Coarse grids and few response levels force ties.
            let (x, y, r) = if coarse {
                (rng.gen_range(0..20) as f64 * (w / 20.0), rng.gen_range(0..15) as f64 * (h / 15.0), rng.gen_range(1..6) as f64 * 0.2)
            } else {
                (rng.gen_range(0.0..w), rng.gen_range(0.0..h), rng.gen_range(0.0..1.0))
            };
            kp(1000 + i as u64, x, y, r)
        })
        .collect()
}

