//! Who-trusts-whom plus user-item ratings: ingestion, dense-core sampling,
//! centering and earliest-rating source labels.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::path::Path;

use gsdeconv::gsp::{parse_edge_records, Graph};
use gsdeconv::synth::RngSeed;
use ndarray::Array2;
use rand::Rng;

use crate::error::{HarnessError, Result};

/// One rating with dense user and item indices.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rating {
    pub user: usize,
    pub item: usize,
    pub rating: f64,
    pub timestamp: i64,
}

/// A rating line as it appears in the file, with original ids.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RawRating {
    pub user_id: u64,
    pub item_id: u64,
    pub rating: f64,
    pub timestamp: i64,
}

/// Ratings and directed trust edges over dense ids. `user_ids[u]` and
/// `item_ids[i]` give the original ids.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RatingsDataset {
    pub trust: Vec<(usize, usize)>,
    pub ratings: Vec<Rating>,
    pub user_ids: Vec<u64>,
    pub item_ids: Vec<u64>,
}

impl RatingsDataset {
    pub fn n_users(&self) -> usize {
        self.user_ids.len()
    }

    pub fn n_items(&self) -> usize {
        self.item_ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.user_ids.is_empty() && self.item_ids.is_empty()
    }

    /// Builds a dataset from original-id records. Users are the union of
    /// rating and trust endpoints, sorted by id; items likewise. Trust
    /// self-loops are dropped. Repeated (user, item) pairs keep the
    /// earliest timestamp, first occurrence on ties.
    pub fn from_raw(trust: &[(u64, u64)], ratings: &[RawRating]) -> Self {
        let mut best: BTreeMap<(u64, u64), RawRating> = BTreeMap::new();
        for r in ratings {
            match best.get_mut(&(r.user_id, r.item_id)) {
                Some(kept) => {
                    log::warn!(
                        "duplicate rating for user {} item {}; keeping the earliest",
                        r.user_id,
                        r.item_id
                    );
                    if r.timestamp < kept.timestamp {
                        *kept = *r;
                    }
                }
                None => {
                    best.insert((r.user_id, r.item_id), *r);
                }
            }
        }
        let users: BTreeSet<u64> = best
            .keys()
            .map(|k| k.0)
            .chain(trust.iter().flat_map(|&(a, b)| [a, b]))
            .collect();
        let items: BTreeSet<u64> = best.keys().map(|k| k.1).collect();
        let user_ids: Vec<u64> = users.into_iter().collect();
        let item_ids: Vec<u64> = items.into_iter().collect();
        let user_index: HashMap<u64, usize> = user_ids.iter().enumerate().map(|(i, &u)| (u, i)).collect();
        let item_index: HashMap<u64, usize> = item_ids.iter().enumerate().map(|(i, &u)| (u, i)).collect();

        let mut dense_trust: Vec<(usize, usize)> = trust
            .iter()
            .filter(|(a, b)| a != b)
            .map(|(a, b)| (user_index[a], user_index[b]))
            .collect();
        dense_trust.sort_unstable();
        dense_trust.dedup();
        let dense_ratings = best
            .values()
            .map(|r| Rating {
                user: user_index[&r.user_id],
                item: item_index[&r.item_id],
                rating: r.rating,
                timestamp: r.timestamp,
            })
            .collect();
        RatingsDataset {
            trust: dense_trust,
            ratings: dense_ratings,
            user_ids,
            item_ids,
        }
    }

    /// Restricts to the given dense users and items and re-densifies.
    pub fn restrict(&self, users: &BTreeSet<usize>, items: &BTreeSet<usize>) -> Self {
        let user_map: HashMap<usize, usize> = users.iter().enumerate().map(|(new, &old)| (old, new)).collect();
        let item_map: HashMap<usize, usize> = items.iter().enumerate().map(|(new, &old)| (old, new)).collect();
        let trust = self
            .trust
            .iter()
            .filter_map(|(a, b)| Some((*user_map.get(a)?, *user_map.get(b)?)))
            .collect();
        let ratings = self
            .ratings
            .iter()
            .filter_map(|r| {
                Some(Rating {
                    user: *user_map.get(&r.user)?,
                    item: *item_map.get(&r.item)?,
                    ..*r
                })
            })
            .collect();
        RatingsDataset {
            trust,
            ratings,
            user_ids: users.iter().map(|&u| self.user_ids[u]).collect(),
            item_ids: items.iter().map(|&i| self.item_ids[i]).collect(),
        }
    }

    /// Symmetrized trust graph `A = (W + Wᵀ)/2` on all users: one-way trust
    /// gives weight 1/2, mutual trust weight 1.
    pub fn trust_graph(&self) -> Result<Graph<f64>> {
        let mut weights: BTreeMap<(usize, usize), f64> = BTreeMap::new();
        for &(a, b) in &self.trust {
            *weights.entry((a.min(b), a.max(b))).or_default() += 0.5;
        }
        let edges: Vec<(usize, usize, f64)> = weights.into_iter().map(|((a, b), w)| (a, b, w)).collect();
        Graph::from_edges(self.n_users(), &edges).map_err(HarnessError::core("trust graph"))
    }
}

/// Parses `user_id,item_id,rating,timestamp` lines. A first line that does
/// not start with a digit is taken as a header; `#` lines and blank lines
/// are skipped.
pub fn parse_ratings(text: &str) -> Result<Vec<RawRating>> {
    let mut out = Vec::new();
    let mut first = true;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if std::mem::take(&mut first) && !line.starts_with(|c: char| c.is_ascii_digit()) {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 4 {
            return Err(HarnessError::Data(format!(
                "ratings line {line_no}: expected 4 fields, found {}",
                fields.len()
            )));
        }
        let bad = |what: &str, s: &str| HarnessError::Data(format!("ratings line {line_no}: bad {what} {s:?}"));
        let user_id = fields[0].parse().map_err(|_| bad("user id", fields[0]))?;
        let item_id = fields[1].parse().map_err(|_| bad("item id", fields[1]))?;
        let rating: f64 = fields[2].parse().map_err(|_| bad("rating", fields[2]))?;
        let timestamp = fields[3].parse().map_err(|_| bad("timestamp", fields[3]))?;
        if !(1.0..=5.0).contains(&rating) {
            return Err(HarnessError::Data(format!(
                "ratings line {line_no}: rating {rating} outside [1, 5]"
            )));
        }
        out.push(RawRating {
            user_id,
            item_id,
            rating,
            timestamp,
        });
    }
    Ok(out)
}

/// Parses a directed `i j` trust edge list.
pub fn parse_trust(text: &str) -> Result<Vec<(u64, u64)>> {
    let records = parse_edge_records(text).map_err(HarnessError::core("trust file"))?;
    Ok(records.iter().map(|r| (r.source as u64, r.target as u64)).collect())
}

pub fn ingest_ratings(trust_path: &Path, ratings_path: &Path) -> Result<RatingsDataset> {
    let read = |p: &Path| std::fs::read_to_string(p).map_err(|e| HarnessError::io(p, e));
    let trust =
        parse_trust(&read(trust_path)?).map_err(|e| HarnessError::Data(format!("{}: {e}", trust_path.display())))?;
    let ratings = parse_ratings(&read(ratings_path)?)
        .map_err(|e| HarnessError::Data(format!("{}: {e}", ratings_path.display())))?;
    Ok(RatingsDataset::from_raw(&trust, &ratings))
}

/// Sizes of the candidate sets after each pass.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CoreIteration {
    pub items: usize,
    pub users: usize,
    pub component: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoreSample {
    pub dataset: RatingsDataset,
    pub trace: Vec<CoreIteration>,
}

/// Repeats until nothing changes: keep items rated by at least
/// `n_min_items` current users, keep users rating at least `n_min_users`
/// current items, keep the trust component (symmetrized, restricted to the
/// remaining users) of a user drawn uniformly with `seed`.
pub fn sample_dense_core(
    data: &RatingsDataset,
    n_min_items: usize,
    n_min_users: usize,
    seed: &RngSeed,
) -> Result<CoreSample> {
    if n_min_items == 0 || n_min_users == 0 {
        return Err(HarnessError::Usage("n_min must be at least 1".into()));
    }
    let mut rng = seed.rng();
    let mut users: BTreeSet<usize> = (0..data.n_users()).collect();
    let mut items: BTreeSet<usize> = (0..data.n_items()).collect();
    let mut neighbors = vec![Vec::new(); data.n_users()];
    for &(a, b) in &data.trust {
        neighbors[a].push(b);
        neighbors[b].push(a);
    }
    let mut trace = Vec::new();
    loop {
        let mut raters = vec![0usize; data.n_items()];
        for r in &data.ratings {
            if users.contains(&r.user) && items.contains(&r.item) {
                raters[r.item] += 1;
            }
        }
        let new_items: BTreeSet<usize> = items.iter().copied().filter(|&i| raters[i] >= n_min_items).collect();

        let mut rated = vec![0usize; data.n_users()];
        for r in &data.ratings {
            if users.contains(&r.user) && new_items.contains(&r.item) {
                rated[r.user] += 1;
            }
        }
        let candidates: BTreeSet<usize> = users.iter().copied().filter(|&u| rated[u] >= n_min_users).collect();
        let n_candidates = candidates.len();

        let component = if candidates.is_empty() {
            BTreeSet::new()
        } else {
            let start = *candidates
                .iter()
                .nth(rng.random_range(0..candidates.len()))
                .expect("nonempty");
            let mut seen = BTreeSet::from([start]);
            let mut queue = VecDeque::from([start]);
            while let Some(u) = queue.pop_front() {
                for &v in &neighbors[u] {
                    if candidates.contains(&v) && seen.insert(v) {
                        queue.push_back(v);
                    }
                }
            }
            seen
        };
        trace.push(CoreIteration {
            items: new_items.len(),
            users: n_candidates,
            component: component.len(),
        });
        let done = component == users && new_items == items;
        users = component;
        items = new_items;
        if done {
            break;
        }
    }
    if users.is_empty() {
        items.clear();
        log::warn!("dense core is empty after {} iterations", trace.len());
    }
    Ok(CoreSample {
        dataset: data.restrict(&users, &items),
        trace,
    })
}

/// `Y[u, i] = rating - 3` on rated cells, 0 elsewhere, plus the rated mask.
pub fn center_ratings(data: &RatingsDataset) -> (Array2<f64>, Array2<bool>) {
    let mut y = Array2::zeros((data.n_users(), data.n_items()));
    let mut mask = Array2::from_elem((data.n_users(), data.n_items()), false);
    for r in &data.ratings {
        y[[r.user, r.item]] = r.rating - 3.0;
        mask[[r.user, r.item]] = true;
    }
    (y, mask)
}

/// Per item, marks the `⌈θ_sr · count⌉` earliest ratings as sources; equal
/// timestamps are ordered by user id.
pub fn earliest_source_labels(data: &RatingsDataset, theta_sr: f64) -> Result<Array2<bool>> {
    if !(theta_sr > 0.0 && theta_sr < 1.0) {
        return Err(HarnessError::Usage(format!("theta_sr = {theta_sr} outside (0, 1)")));
    }
    let mut per_item: Vec<Vec<(i64, u64, usize)>> = vec![Vec::new(); data.n_items()];
    for r in &data.ratings {
        per_item[r.item].push((r.timestamp, data.user_ids[r.user], r.user));
    }
    let mut labels = Array2::from_elem((data.n_users(), data.n_items()), false);
    for (item, mut list) in per_item.into_iter().enumerate() {
        list.sort_unstable();
        let keep = (theta_sr * list.len() as f64).ceil() as usize;
        for &(_, _, user) in list.iter().take(keep) {
            labels[[user, item]] = true;
        }
    }
    Ok(labels)
}
