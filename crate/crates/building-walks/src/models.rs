//! Explicit finite rank-2 geometries and brute-force walks on their flags.
//!
//! Three families are constructible: complete bipartite incidences (digons,
//! any parameters), projective planes over small prime fields, and the
//! symplectic quadrangles over F_2 and F_3. Each model carries its full
//! chamber set, the panel adjacency, and a Weyl distance table built by
//! labeled breadth-first search and then re-audited edge by edge — so a
//! construction bug surfaces as a `not-a-building` error, not as silently
//! wrong probabilities. Walks run here by exact vector evolution and by
//! seeded Monte Carlo, independently of the algebra in [`crate::hecke`].

use std::collections::HashMap;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};

use crate::coxeter::CoxeterGroup;
use crate::error::Error;
use crate::hecke::{HeckeSystem, WalkSpec};
use crate::scalar::Scalar;
use crate::Result;

/// The constructible model families.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    /// Every point on every line: the generalized digon, any `q, r >= 1`.
    CompleteBipartite,
    /// Desarguesian plane over F_q, `q = r` prime in {2, 3, 5, 7}.
    ProjectivePlane,
    /// Totally isotropic points/lines of a symplectic form on F_q^4,
    /// `q = r` in {2, 3}.
    SymplecticQuadrangle,
}

impl ModelKind {
    /// Gonality: half the girth of the incidence graph, and the bond order
    /// of the Weyl group.
    pub fn gonality(self) -> u32 {
        match self {
            ModelKind::CompleteBipartite => 2,
            ModelKind::ProjectivePlane => 3,
            ModelKind::SymplecticQuadrangle => 4,
        }
    }
}

/// A fully materialized flag complex with audited Weyl distances.
pub struct IncidenceModel {
    kind: ModelKind,
    q: u64,
    r: u64,
    n_points: usize,
    n_lines: usize,
    group: CoxeterGroup,
    /// chamber -> (point id, line id)
    chambers: Vec<(u32, u32)>,
    /// `adj[0]`: same line, other point; `adj[1]`: same point, other line
    adj: [Vec<Vec<u32>>; 2],
    /// row-major chamber-pair Weyl distances (element ids fit in u8)
    delta: Vec<u8>,
}

/// Histogram result of a Monte Carlo run.
#[derive(Clone, Debug, Serialize)]
pub struct SimulationReport {
    pub histogram: Vec<u64>,
    pub trials: u64,
    pub steps: u32,
    pub seed: u64,
}

/// Re-checkable facts about a model, for audit output.
#[derive(Clone, Debug, Serialize)]
pub struct AuditReport {
    pub kind: ModelKind,
    pub q: u64,
    pub r: u64,
    pub gonality: u32,
    pub points: usize,
    pub lines: usize,
    pub chambers: usize,
    pub points_per_line: usize,
    pub lines_per_point: usize,
    pub incidence_girth: usize,
    pub max_weyl_length: usize,
    pub sphere_census_ok: bool,
    pub edge_rule_ok: bool,
    pub symmetry_ok: bool,
}

/// Build a model, or explain why the parameters name none.
pub fn build_model(kind: ModelKind, q: u64, r: u64) -> Result<IncidenceModel> {
    let (points, lines): (Vec<u32>, Vec<Vec<u32>>) = match kind {
        ModelKind::CompleteBipartite => {
            if q < 1 || r < 1 {
                return Err(Error::InvalidInput(
                    "complete bipartite model needs q >= 1 and r >= 1".into(),
                ));
            }
            let n_points = (q + 1) as usize;
            let n_lines = (r + 1) as usize;
            if n_points.saturating_mul(n_lines) > 250_000 {
                return Err(Error::InvalidInput(format!(
                    "flag count {}x{} is too large to materialize",
                    n_points, n_lines
                )));
            }
            let all: Vec<u32> = (0..n_points as u32).collect();
            ((0..n_points as u32).collect(), vec![all; n_lines])
        }
        ModelKind::ProjectivePlane => {
            if q != r {
                return Err(Error::InvalidInput(
                    "projective planes have equal parameters".into(),
                ));
            }
            if !matches!(q, 2 | 3 | 5 | 7) {
                return Err(Error::InvalidInput(format!(
                    "projective plane order must be a prime in {{2,3,5,7}}, got {q}"
                )));
            }
            projective_plane(q as u32)
        }
        ModelKind::SymplecticQuadrangle => {
            if q != r {
                return Err(Error::InvalidInput(
                    "symplectic quadrangles have equal parameters".into(),
                ));
            }
            if !matches!(q, 2 | 3) {
                return Err(Error::InvalidInput(format!(
                    "symplectic quadrangle order must be 2 or 3, got {q}"
                )));
            }
            symplectic_quadrangle(q as u32)
        }
    };
    IncidenceModel::from_incidence(kind, q, r, points.len(), lines)
}

/// Normalized homogeneous triples over F_p and line-by-line point lists.
fn projective_plane(p: u32) -> (Vec<u32>, Vec<Vec<u32>>) {
    let pts = projective_points::<3>(p);
    let index: HashMap<[u32; 3], u32> = pts
        .iter()
        .enumerate()
        .map(|(i, &v)| (v, i as u32))
        .collect();
    // lines are indexed by the same normalized triples (the dual plane);
    // incidence is a vanishing dot product
    let lines: Vec<Vec<u32>> = pts
        .iter()
        .map(|l| {
            pts.iter()
                .filter(|x| {
                    (0..3).map(|i| l[i] * x[i]).sum::<u32>() % p == 0
                })
                .map(|x| index[x])
                .collect()
        })
        .collect();
    ((0..pts.len() as u32).collect(), lines)
}

/// All points of projective (N-1)-space over F_p: nonzero vectors with the
/// first nonzero coordinate normalized to 1, in lexicographic order.
fn projective_points<const N: usize>(p: u32) -> Vec<[u32; N]> {
    let mut out = Vec::new();
    let mut v = [0u32; N];
    loop {
        if v.iter().any(|&x| x != 0) {
            let first = v.iter().find(|&&x| x != 0).copied().unwrap();
            if first == 1 {
                out.push(v);
            }
        }
        // odometer increment
        let mut i = N;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            v[i] += 1;
            if v[i] < p {
                break;
            }
            v[i] = 0;
        }
    }
}

/// Points of F_p^4-projective space and the lines that are totally isotropic
/// for the standard symplectic form.
fn symplectic_quadrangle(p: u32) -> (Vec<u32>, Vec<Vec<u32>>) {
    let pts = projective_points::<4>(p);
    let index: HashMap<[u32; 4], u32> = pts
        .iter()
        .enumerate()
        .map(|(i, &v)| (v, i as u32))
        .collect();
    let form = |u: &[u32; 4], v: &[u32; 4]| -> u32 {
        // x1 y2 - x2 y1 + x3 y4 - x4 y3, computed additively mod p
        let pos = u[0] * v[1] + u[2] * v[3];
        let neg = u[1] * v[0] + u[3] * v[2];
        (pos + p * p * p - neg) % p
    };
    let normalize = |mut v: [u32; 4]| -> [u32; 4] {
        let first = v.iter().find(|&&x| x != 0).copied().unwrap();
        let inv = (1..p).find(|&k| (k * first) % p == 1).unwrap();
        for x in v.iter_mut() {
            *x = (*x * inv) % p;
        }
        v
    };
    let mut lines: Vec<Vec<u32>> = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            if form(&pts[i], &pts[j]) != 0 {
                continue;
            }
            // the span {a u + b v}: collect its projective points
            let mut members: Vec<u32> = Vec::new();
            for a in 0..p {
                for b in 0..p {
                    if a == 0 && b == 0 {
                        continue;
                    }
                    let w = normalize([
                        (a * pts[i][0] + b * pts[j][0]) % p,
                        (a * pts[i][1] + b * pts[j][1]) % p,
                        (a * pts[i][2] + b * pts[j][2]) % p,
                        (a * pts[i][3] + b * pts[j][3]) % p,
                    ]);
                    let id = index[&w];
                    if !members.contains(&id) {
                        members.push(id);
                    }
                }
            }
            members.sort_unstable();
            if seen.insert(members.clone()) {
                lines.push(members);
            }
        }
    }
    lines.sort();
    ((0..pts.len() as u32).collect(), lines)
}

impl IncidenceModel {
    fn from_incidence(
        kind: ModelKind,
        q: u64,
        r: u64,
        n_points: usize,
        line_points: Vec<Vec<u32>>,
    ) -> Result<Self> {
        let n_lines = line_points.len();
        // regularity audit before anything else
        for (l, pts) in line_points.iter().enumerate() {
            if pts.len() as u64 != q + 1 {
                return Err(Error::NotABuilding(format!(
                    "line {l} carries {} points, expected {}",
                    pts.len(),
                    q + 1
                )));
            }
        }
        let mut lines_of_point: Vec<Vec<u32>> = vec![Vec::new(); n_points];
        for (l, pts) in line_points.iter().enumerate() {
            for &pt in pts {
                lines_of_point[pt as usize].push(l as u32);
            }
        }
        if let Some((pt, ls)) = lines_of_point
            .iter()
            .enumerate()
            .find(|(_, ls)| ls.len() as u64 != r + 1)
        {
            return Err(Error::NotABuilding(format!(
                "point {pt} lies on {} lines, expected {}",
                ls.len(),
                r + 1
            )));
        }
        // chambers: incident (point, line) pairs, sorted for stable ids
        let mut chambers: Vec<(u32, u32)> = Vec::new();
        for (l, pts) in line_points.iter().enumerate() {
            for &pt in pts {
                chambers.push((pt, l as u32));
            }
        }
        chambers.sort_unstable();
        let chamber_id: HashMap<(u32, u32), u32> = chambers
            .iter()
            .enumerate()
            .map(|(i, &c)| (c, i as u32))
            .collect();
        let n = chambers.len();
        let mut adj0: Vec<Vec<u32>> = vec![Vec::new(); n]; // same line
        let mut adj1: Vec<Vec<u32>> = vec![Vec::new(); n]; // same point
        for (c, &(pt, l)) in chambers.iter().enumerate() {
            for &pt2 in &line_points[l as usize] {
                if pt2 != pt {
                    adj0[c].push(chamber_id[&(pt2, l)]);
                }
            }
            for &l2 in &lines_of_point[pt as usize] {
                if l2 != l {
                    adj1[c].push(chamber_id[&(pt, l2)]);
                }
            }
        }
        let group = CoxeterGroup::dihedral_system(kind.gonality())?;
        let delta = weyl_distance_table(&adj0, &adj1, &group, &[q, r])?;
        Ok(IncidenceModel {
            kind,
            q,
            r,
            n_points,
            n_lines,
            group,
            chambers,
            adj: [adj0, adj1],
            delta,
        })
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn r(&self) -> u64 {
        self.r
    }

    pub fn group(&self) -> &CoxeterGroup {
        &self.group
    }

    pub fn points(&self) -> usize {
        self.n_points
    }

    pub fn lines(&self) -> usize {
        self.n_lines
    }

    pub fn chamber_count(&self) -> usize {
        self.chambers.len()
    }

    /// (point id, line id) of a chamber.
    pub fn chamber(&self, c: u32) -> (u32, u32) {
        self.chambers[c as usize]
    }

    /// Weyl distance as an element id of [`Self::group`].
    pub fn weyl_distance(&self, x: u32, y: u32) -> usize {
        self.delta[x as usize * self.chambers.len() + y as usize] as usize
    }

    /// Chambers at Weyl distance `w` from `x`.
    pub fn sphere(&self, x: u32, w: usize) -> Vec<u32> {
        let n = self.chambers.len();
        (0..n as u32)
            .filter(|&y| self.delta[x as usize * n + y as usize] as usize == w)
            .collect()
    }

    /// `|{z : distance(x,z) = u and distance(z,y) = v}|` — the geometric
    /// count behind the algebra's structure constants.
    pub fn intersection_count(&self, x: u32, y: u32, u: usize, v: usize) -> usize {
        let n = self.chambers.len();
        let vinv = self.group.inverse(v);
        (0..n).filter(|&z| {
            self.delta[x as usize * n + z] as usize == u
                && self.delta[y as usize * n + z] as usize == vinv
        })
        .count()
    }

    /// The matching algebra system (same bond order and parameters, so
    /// element ids are directly comparable).
    pub fn hecke_system<S: Scalar>(&self) -> Arc<HeckeSystem<S>> {
        let group =
            CoxeterGroup::dihedral_system(self.kind.gonality()).expect("valid bond order");
        HeckeSystem::new(group, vec![S::from_u64(self.q), S::from_u64(self.r)])
            .expect("model parameters are positive")
    }

    fn check_walk_system<S: Scalar>(&self, walk: &WalkSpec<S>) -> Result<()> {
        let sys = walk.system();
        if sys.group().matrix() != self.group.matrix() {
            return Err(Error::InvalidInput(
                "walk is defined over a different Coxeter system than the model".into(),
            ));
        }
        if *sys.param(0) != S::from_u64(self.q) || *sys.param(1) != S::from_u64(self.r) {
            return Err(Error::InvalidInput(format!(
                "walk parameters ({}, {}) do not match the model's ({}, {})",
                sys.param(0),
                sys.param(1),
                self.q,
                self.r
            )));
        }
        Ok(())
    }

    /// n-step distribution from `start`, by direct vector evolution over the
    /// chamber set (no algebra involved).
    pub fn exact_evolution<S: Scalar>(
        &self,
        walk: &WalkSpec<S>,
        start: u32,
        n: u32,
    ) -> Result<Vec<S>> {
        self.check_walk_system(walk)?;
        let count = self.chambers.len();
        if start as usize >= count {
            return Err(Error::InvalidInput(format!(
                "start chamber {start} out of range"
            )));
        }
        // per-support sphere lists, computed once
        let moves: Vec<(S, Vec<Vec<u32>>)> = walk
            .weights()
            .map(|(w, a)| {
                let rate = a.clone() * walk.system().q_w_inv(w).clone();
                let spheres: Vec<Vec<u32>> =
                    (0..count as u32).map(|x| self.sphere(x, w)).collect();
                (rate, spheres)
            })
            .collect();
        let mut cur = vec![S::zero(); count];
        cur[start as usize] = S::one();
        for _ in 0..n {
            let mut next = vec![S::zero(); count];
            for (x, px) in cur.iter().enumerate() {
                if px.is_zero() {
                    continue;
                }
                for (rate, spheres) in &moves {
                    let mass = px.clone() * rate.clone();
                    for &y in &spheres[x] {
                        let slot = &mut next[y as usize];
                        *slot = slot.clone() + mass.clone();
                    }
                }
            }
            cur = next;
        }
        Ok(cur)
    }

    /// Monte Carlo walk: `trials` independent runs of `steps` steps from
    /// `start`, returning the end-chamber histogram. Each trial draws from a
    /// dedicated stream of one seeded generator, so the histogram is
    /// identical for every worker count.
    pub fn simulate<S: Scalar>(
        &self,
        walk: &WalkSpec<S>,
        start: u32,
        steps: u32,
        trials: u64,
        seed: u64,
        workers: usize,
    ) -> Result<SimulationReport> {
        self.check_walk_system(walk)?;
        let count = self.chambers.len();
        if start as usize >= count {
            return Err(Error::InvalidInput(format!(
                "start chamber {start} out of range"
            )));
        }
        let workers = workers.max(1);
        // cumulative step-kind weights and their sphere lists
        let mut cumulative: Vec<(f64, Vec<Vec<u32>>)> = Vec::new();
        let mut acc = 0.0;
        for (w, a) in walk.weights() {
            acc += a.to_f64_approx();
            let spheres: Vec<Vec<u32>> = (0..count as u32).map(|x| self.sphere(x, w)).collect();
            cumulative.push((acc, spheres));
        }
        let chunk = trials.div_ceil(workers as u64).max(1);
        let histogram = std::thread::scope(|scope| {
            let cumulative = &cumulative;
            let handles: Vec<_> = (0..workers as u64)
                .map(|w| {
                    scope.spawn(move || {
                        let lo = w * chunk;
                        let hi = ((w + 1) * chunk).min(trials);
                        let mut hist = vec![0u64; count];
                        let mut rng = ChaCha12Rng::seed_from_u64(seed);
                        for trial in lo..hi {
                            rng.set_stream(trial);
                            // restart the stream at a fixed position
                            rng.set_word_pos(0);
                            let mut at = start;
                            for _ in 0..steps {
                                let u: f64 = rng.gen();
                                let (_, spheres) = cumulative
                                    .iter()
                                    .find(|(c, _)| u < *c)
                                    .unwrap_or(cumulative.last().expect("nonempty walk"));
                                let sphere = &spheres[at as usize];
                                if sphere.is_empty() {
                                    continue; // a_e mass: stay in place
                                }
                                at = sphere[rng.gen_range(0..sphere.len())];
                            }
                            hist[at as usize] += 1;
                        }
                        hist
                    })
                })
                .collect();
            let mut total = vec![0u64; count];
            for h in handles {
                for (t, v) in total.iter_mut().zip(h.join().expect("worker panicked")) {
                    *t += v;
                }
            }
            total
        });
        Ok(SimulationReport {
            histogram,
            trials,
            steps,
            seed,
        })
    }

    /// Re-run every structural check and report the facts.
    pub fn audit(&self) -> AuditReport {
        let n = self.chambers.len();
        let census = self.sphere_census_ok();
        let edges = self.edge_rule_ok();
        let symmetry = (0..n).all(|x| {
            (0..n).all(|y| {
                let d = self.delta[x * n + y] as usize;
                let dt = self.delta[y * n + x] as usize;
                dt == self.group.inverse(d)
            })
        });
        let max_len = self
            .delta
            .iter()
            .map(|&w| self.group.length(w as usize))
            .max()
            .unwrap_or(0);
        AuditReport {
            kind: self.kind,
            q: self.q,
            r: self.r,
            gonality: self.kind.gonality(),
            points: self.n_points,
            lines: self.n_lines,
            chambers: n,
            points_per_line: (self.q + 1) as usize,
            lines_per_point: (self.r + 1) as usize,
            incidence_girth: self.incidence_girth(),
            max_weyl_length: max_len,
            sphere_census_ok: census,
            edge_rule_ok: edges,
            symmetry_ok: symmetry,
        }
    }

    fn sphere_census_ok(&self) -> bool {
        let n = self.chambers.len();
        let expected: Vec<u64> = self
            .group
            .elements()
            .map(|w| {
                self.group
                    .word(w)
                    .iter()
                    .map(|&s| if s == 0 { self.q } else { self.r })
                    .product()
            })
            .collect();
        (0..n).all(|x| {
            let mut counts = vec![0u64; self.group.order()];
            for y in 0..n {
                counts[self.delta[x * n + y] as usize] += 1;
            }
            counts == expected
        })
    }

    fn edge_rule_ok(&self) -> bool {
        let n = self.chambers.len();
        (0..n).all(|x| {
            (0..n as u32).all(|y| {
                (0..2usize).all(|s| {
                    let w = self.delta[x * n + y as usize] as usize;
                    let (ws, sign) = self.group.right_multiply(w, s);
                    self.adj[s][y as usize].iter().all(|&y2| {
                        let w2 = self.delta[x * n + y2 as usize] as usize;
                        if sign > 0 {
                            w2 == ws
                        } else {
                            w2 == ws || w2 == w
                        }
                    })
                })
            })
        })
    }

    /// Girth of the bipartite point/line incidence graph.
    fn incidence_girth(&self) -> usize {
        // vertices: points then lines
        let np = self.n_points;
        let nv = np + self.n_lines;
        let neighbors = |v: usize| -> Vec<usize> {
            if v < np {
                self.adjacent_lines(v).map(|l| np + l).collect()
            } else {
                self.line_points(v - np).map(|p| p as usize).collect()
            }
        };
        let mut girth = usize::MAX;
        for root in 0..nv {
            let mut dist = vec![usize::MAX; nv];
            let mut parent = vec![usize::MAX; nv];
            let mut queue = std::collections::VecDeque::new();
            dist[root] = 0;
            queue.push_back(root);
            while let Some(u) = queue.pop_front() {
                for v in neighbors(u) {
                    if dist[v] == usize::MAX {
                        dist[v] = dist[u] + 1;
                        parent[v] = u;
                        queue.push_back(v);
                    } else if parent[u] != v {
                        girth = girth.min(dist[u] + dist[v] + 1);
                    }
                }
            }
        }
        girth
    }

    fn adjacent_lines(&self, point: usize) -> impl Iterator<Item = usize> + '_ {
        let point = point as u32;
        self.chambers
            .iter()
            .filter(move |&&(p, _)| p == point)
            .map(|&(_, l)| l as usize)
    }

    fn line_points(&self, line: usize) -> impl Iterator<Item = u32> + '_ {
        let line = line as u32;
        self.chambers
            .iter()
            .filter(move |&&(_, l)| l == line)
            .map(|&(p, _)| p)
    }
}

/// Labeled BFS assignment of Weyl distances from every start chamber,
/// followed by a full re-audit of every edge against the panel rule and a
/// sphere census. Exposed separately so a wrong gonality (or a broken
/// geometry) can be demonstrated to fail.
pub fn weyl_distance_table(
    adj0: &[Vec<u32>],
    adj1: &[Vec<u32>],
    group: &CoxeterGroup,
    params: &[u64; 2],
) -> Result<Vec<u8>> {
    let n = adj0.len();
    assert_eq!(adj1.len(), n);
    assert!(group.order() <= u8::MAX as usize + 1);
    let adj = [adj0, adj1];
    let unset = u8::MAX;
    let mut delta = vec![unset; n * n];
    for x in 0..n {
        let row = &mut delta[x * n..(x + 1) * n];
        row[x] = CoxeterGroup::IDENTITY as u8;
        let mut queue = std::collections::VecDeque::from([x as u32]);
        while let Some(y) = queue.pop_front() {
            let w = row[y as usize] as usize;
            for s in 0..2usize {
                let (ws, sign) = group.right_multiply(w, s);
                if sign < 0 {
                    continue; // only ascents assign labels
                }
                for &y2 in &adj[s][y as usize] {
                    if row[y2 as usize] == unset {
                        row[y2 as usize] = ws as u8;
                        queue.push_back(y2);
                    }
                }
            }
        }
        if let Some(y) = row.iter().position(|&v| v == unset) {
            return Err(Error::NotABuilding(format!(
                "chamber {y} not reachable from {x} by label-ascending galleries"
            )));
        }
    }
    // full edge re-audit: every panel mate must sit where the rule allows
    for x in 0..n {
        for y in 0..n {
            let w = delta[x * n + y] as usize;
            for s in 0..2usize {
                let (ws, sign) = group.right_multiply(w, s);
                for &y2 in &adj[s][y] {
                    let w2 = delta[x * n + y2 as usize] as usize;
                    let ok = if sign > 0 { w2 == ws } else { w2 == ws || w2 == w };
                    if !ok {
                        return Err(Error::NotABuilding(format!(
                            "edge rule fails at x={x}, y={y}, s={}: \
                             distance {} next to {}",
                            s + 1,
                            group.length(w),
                            group.length(w2)
                        )));
                    }
                }
            }
        }
    }
    // sphere census: |sphere_w(x)| must be the parameter product q_w
    let expected: Vec<u64> = group
        .elements()
        .map(|w| {
            group
                .word(w)
                .iter()
                .map(|&s| params[s as usize])
                .product()
        })
        .collect();
    for x in 0..n {
        let mut counts = vec![0u64; group.order()];
        for y in 0..n {
            counts[delta[x * n + y] as usize] += 1;
        }
        if counts != expected {
            return Err(Error::NotABuilding(format!(
                "sphere census at chamber {x}: got {counts:?}, expected {expected:?}"
            )));
        }
    }
    Ok(delta)
}

/// `(1/2) sum_y |p(y) - 1/N|`: exact distance to the uniform distribution.
pub fn total_variation_from_uniform<S: Scalar>(dist: &[S]) -> S {
    let u = S::from_u64(dist.len() as u64).recip();
    let mut acc = S::zero();
    for p in dist {
        let d = p.clone() - u.clone();
        acc = acc + if d.is_nonnegative() { d } else { -d };
    }
    acc * S::ratio(1, 2)
}
