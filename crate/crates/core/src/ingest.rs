//! Commit-table parsing, bipartite projection into the contributor graph,
//! and the bot/country filters.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::io::Read;

use chrono::NaiveDate;

use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};

/// One contribution event from the commits table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommitRecord {
    pub repo_name: String,
    pub user_login: String,
    pub date: NaiveDate,
    pub lines_added: u64,
    pub lines_deleted: u64,
}

/// One `(repo, language, bytes)` row from the repository language table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RepoLanguageRecord {
    pub repo_name: String,
    pub language: String,
    pub bytes: u64,
}

/// One `(login, country)` row; a user may appear on several rows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UserCountryRecord {
    pub user_login: String,
    pub country_code: String,
}

/// Per-node optional attributes, indexed by `NodeId`.
#[derive(Debug, Clone, Default)]
pub struct AttributeMap {
    pub country: Vec<Option<String>>,
    pub language: Vec<Option<String>>,
}

/// Parsed rows plus the count of malformed rows that were skipped.
#[derive(Debug, Clone)]
pub struct Parsed<T> {
    pub records: Vec<T>,
    pub skipped_rows: usize,
}

const COMMITS_HEADER: [&str; 5] = ["repo", "login", "date", "added", "deleted"];
const COUNTRIES_HEADER: [&str; 2] = ["login", "country_code"];
const LANGUAGES_HEADER: [&str; 3] = ["repo", "language", "bytes"];

fn check_header<R: Read>(rdr: &mut csv::Reader<R>, expected: &[&str]) -> Result<()> {
    let got = rdr.headers()?;
    let matches = got.len() == expected.len()
        && got
            .iter()
            .zip(expected)
            .all(|(g, e)| g.trim().eq_ignore_ascii_case(e));
    if matches {
        Ok(())
    } else {
        Err(Error::BadHeader {
            expected: expected.join(","),
            got: got.iter().collect::<Vec<_>>().join(","),
        })
    }
}

/// Parses the commits table (`repo,login,date,added,deleted`). A missing or
/// wrong header is fatal; malformed rows are skipped and tallied.
pub fn parse_commits<R: Read>(reader: R) -> Result<Parsed<CommitRecord>> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    check_header(&mut rdr, &COMMITS_HEADER)?;

    let mut records = Vec::new();
    let mut skipped_rows = 0;
    for row in rdr.records() {
        let parsed = row.ok().and_then(|r| parse_commit_row(&r));
        match parsed {
            Some(rec) => records.push(rec),
            None => skipped_rows += 1,
        }
    }
    Ok(Parsed { records, skipped_rows })
}

fn parse_commit_row(row: &csv::StringRecord) -> Option<CommitRecord> {
    if row.len() != 5 {
        return None;
    }
    let repo_name = row[0].trim();
    let user_login = row[1].trim();
    if repo_name.is_empty() || user_login.is_empty() {
        return None;
    }
    let date = NaiveDate::parse_from_str(row[2].trim(), "%Y-%m-%d").ok()?;
    let lines_added = row[3].trim().parse().ok()?;
    let lines_deleted = row[4].trim().parse().ok()?;
    Some(CommitRecord {
        repo_name: repo_name.to_string(),
        user_login: user_login.to_string(),
        date,
        lines_added,
        lines_deleted,
    })
}

/// Parses the country table (`login,country_code`). Codes must be two ASCII
/// uppercase letters; rows that fail validation are skipped and tallied.
pub fn parse_countries<R: Read>(reader: R) -> Result<Parsed<UserCountryRecord>> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    check_header(&mut rdr, &COUNTRIES_HEADER)?;

    let mut records = Vec::new();
    let mut skipped_rows = 0;
    for row in rdr.records() {
        let parsed = row.ok().and_then(|r| {
            if r.len() != 2 {
                return None;
            }
            let login = r[0].trim();
            let code = r[1].trim();
            if login.is_empty() || !is_valid_country_code(code) {
                return None;
            }
            Some(UserCountryRecord { user_login: login.to_string(), country_code: code.to_string() })
        });
        match parsed {
            Some(rec) => records.push(rec),
            None => skipped_rows += 1,
        }
    }
    Ok(Parsed { records, skipped_rows })
}

fn is_valid_country_code(code: &str) -> bool {
    code.len() == 2 && code.bytes().all(|b| b.is_ascii_uppercase())
}

/// Parses the repository language table (`repo,language,bytes`).
pub fn parse_repo_languages<R: Read>(reader: R) -> Result<Parsed<RepoLanguageRecord>> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    check_header(&mut rdr, &LANGUAGES_HEADER)?;

    let mut records = Vec::new();
    let mut skipped_rows = 0;
    for row in rdr.records() {
        let parsed = row.ok().and_then(|r| {
            if r.len() != 3 {
                return None;
            }
            let repo = r[0].trim();
            let language = r[1].trim();
            if repo.is_empty() || language.is_empty() {
                return None;
            }
            let bytes: u64 = r[2].trim().parse().ok()?;
            Some(RepoLanguageRecord {
                repo_name: repo.to_string(),
                language: language.to_string(),
                bytes,
            })
        });
        match parsed {
            Some(rec) => records.push(rec),
            None => skipped_rows += 1,
        }
    }
    Ok(Parsed { records, skipped_rows })
}

/// Drops all records of users whose login ends with `suffix`
/// (case-insensitive). Returns the surviving records and the number of
/// distinct users removed.
pub fn filter_bots(records: Vec<CommitRecord>, suffix: &str) -> (Vec<CommitRecord>, usize) {
    let suffix_lower = suffix.to_lowercase();
    let is_bot = |login: &str| login.to_lowercase().ends_with(&suffix_lower);
    let mut removed: BTreeSet<String> = BTreeSet::new();
    let kept = records
        .into_iter()
        .filter(|r| {
            if is_bot(&r.user_login) {
                removed.insert(r.user_login.clone());
                false
            } else {
                true
            }
        })
        .collect();
    (kept, removed.len())
}

/// Default cap on contributors per repository during projection. A single
/// mega-repository would emit O(k²) edges and drown the signal.
pub const DEFAULT_REPO_CAP: usize = 10_000;

/// A contributor graph together with its login index: `users[node]` is the
/// login of `node`, and node ids follow lexicographic login order.
#[derive(Debug, Clone)]
pub struct Projection {
    pub graph: Graph,
    pub users: Vec<String>,
    /// Repositories skipped for exceeding the contributor cap.
    pub capped_repos: usize,
}

impl Projection {
    pub fn node_of(&self, login: &str) -> Option<NodeId> {
        self.users.binary_search_by(|u| u.as_str().cmp(login)).ok()
    }
}

/// Projects commit records onto the contributor graph: users who committed
/// to the same repository are tied, and the edge weight counts the distinct
/// repositories the pair shares. Users without a co-contributor never enter
/// the graph.
pub fn project_collaboration(records: &[CommitRecord], repo_cap: usize) -> Projection {
    let mut login_ids: HashMap<&str, u32> = HashMap::new();
    let mut logins: Vec<&str> = Vec::new();
    let mut repo_users: HashMap<&str, BTreeSet<u32>> = HashMap::new();
    for r in records {
        let id = *login_ids.entry(r.user_login.as_str()).or_insert_with(|| {
            logins.push(r.user_login.as_str());
            (logins.len() - 1) as u32
        });
        repo_users.entry(r.repo_name.as_str()).or_default().insert(id);
    }

    let mut pair_counts: HashMap<(u32, u32), u32> = HashMap::new();
    let mut capped_repos = 0;
    for (repo, users) in &repo_users {
        if users.len() > repo_cap {
            log::warn!(
                "skipping repo {repo}: {} contributors exceed the cap of {repo_cap}",
                users.len()
            );
            capped_repos += 1;
            continue;
        }
        let members: Vec<u32> = users.iter().copied().collect();
        for (i, &a) in members.iter().enumerate() {
            for &b in &members[i + 1..] {
                *pair_counts.entry((a, b)).or_insert(0) += 1;
            }
        }
    }

    // Node ids follow sorted login order, which makes the projection
    // independent of record order.
    let mut connected: BTreeSet<&str> = BTreeSet::new();
    for &(a, b) in pair_counts.keys() {
        connected.insert(logins[a as usize]);
        connected.insert(logins[b as usize]);
    }
    let users: Vec<String> = connected.iter().map(|s| s.to_string()).collect();
    let node_of: HashMap<&str, NodeId> =
        connected.iter().enumerate().map(|(i, &login)| (login, i)).collect();

    let edges = pair_counts.iter().map(|(&(a, b), &count)| {
        let u = node_of[logins[a as usize]];
        let v = node_of[logins[b as usize]];
        (u, v, count as f64)
    });
    let graph = Graph::from_edges(users.len(), edges).expect("projection edges are valid");
    Projection { graph, users, capped_repos }
}

/// Induced subgraph on users with exactly one valid country record.
/// Users reported in multiple countries are dropped, and so are nodes left
/// isolated by the cut.
pub fn subset_international(proj: &Projection, countries: &[UserCountryRecord]) -> Projection {
    let mut codes: HashMap<&str, BTreeSet<&str>> = HashMap::new();
    for rec in countries {
        codes.entry(rec.user_login.as_str()).or_default().insert(rec.country_code.as_str());
    }
    let eligible: Vec<bool> = proj
        .users
        .iter()
        .map(|login| codes.get(login.as_str()).map_or(false, |set| set.len() == 1))
        .collect();

    let kept_edges: Vec<_> = proj
        .graph
        .edges()
        .iter()
        .filter(|e| eligible[e.u] && eligible[e.v])
        .collect();

    let mut has_edge = vec![false; proj.users.len()];
    for e in &kept_edges {
        has_edge[e.u] = true;
        has_edge[e.v] = true;
    }

    let mut old_to_new = vec![usize::MAX; proj.users.len()];
    let mut users = Vec::new();
    for (old, login) in proj.users.iter().enumerate() {
        if has_edge[old] {
            old_to_new[old] = users.len();
            users.push(login.clone());
        }
    }
    let edges = kept_edges
        .iter()
        .map(|e| (old_to_new[e.u], old_to_new[e.v], e.weight));
    let graph = Graph::from_edges(users.len(), edges).expect("induced edges are valid");
    Projection { graph, users, capped_repos: proj.capped_repos }
}

/// Joins per-login attribute tables onto the node index. Users absent from a
/// table carry `None`. Conflicting country rows for a user in the index are
/// an error listing the offenders.
pub fn join_attributes(
    users: &[String],
    countries: &[UserCountryRecord],
    languages: &BTreeMap<String, String>,
) -> Result<AttributeMap> {
    let mut codes: HashMap<&str, BTreeSet<&str>> = HashMap::new();
    for rec in countries {
        codes.entry(rec.user_login.as_str()).or_default().insert(rec.country_code.as_str());
    }
    let conflicted: Vec<&str> = users
        .iter()
        .map(String::as_str)
        .filter(|login| codes.get(login).is_some_and(|set| set.len() > 1))
        .collect();
    if !conflicted.is_empty() {
        return Err(Error::ConflictingCountries(conflicted.join(", ")));
    }

    let country = users
        .iter()
        .map(|login| {
            codes
                .get(login.as_str())
                .and_then(|set| set.iter().next())
                .map(|code| code.to_string())
        })
        .collect();
    let language = users.iter().map(|login| languages.get(login).cloned()).collect();
    Ok(AttributeMap { country, language })
}
