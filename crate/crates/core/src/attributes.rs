//! The four user-language assignment rules and their community-level
//! summaries.
//!
//! All rules operate on the single-language repository subset and break
//! ties lexicographically, so every assignment is deterministic.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::ingest::{CommitRecord, RepoLanguageRecord};
use crate::partition::Partition;

/// Which heuristic produced an assignment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum Rule {
    /// Language of the contributed repo with the most bytes.
    Bytes,
    /// Language gathering the most of the user's commits.
    Commits,
    /// Mode over the languages of the distinct repos the user touched.
    Majority,
    /// Majority over owned repos, falling back to the bytes rule.
    Ownership,
}

impl Rule {
    pub const ALL: [Rule; 4] = [Rule::Bytes, Rule::Commits, Rule::Majority, Rule::Ownership];

    pub fn id(self) -> u8 {
        match self {
            Rule::Bytes => 1,
            Rule::Commits => 2,
            Rule::Majority => 3,
            Rule::Ownership => 4,
        }
    }

    pub fn from_id(id: u8) -> Option<Rule> {
        Rule::ALL.iter().copied().find(|r| r.id() == id)
    }
}

/// Repositories carrying exactly one language record.
#[derive(Debug, Clone)]
pub struct SingleLanguageRepos {
    /// repo → (language, bytes in that language).
    map: BTreeMap<String, (String, u64)>,
    /// Share of input repos that had a single language.
    pub retained_fraction: f64,
}

impl SingleLanguageRepos {
    pub fn language_of(&self, repo: &str) -> Option<&str> {
        self.map.get(repo).map(|(lang, _)| lang.as_str())
    }

    pub fn bytes_of(&self, repo: &str) -> Option<u64> {
        self.map.get(repo).map(|&(_, bytes)| bytes)
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }
}

/// Keeps repos with exactly one language record and reports the retained
/// fraction of the input repo set.
pub fn single_language_repos(records: &[RepoLanguageRecord]) -> SingleLanguageRepos {
    let mut per_repo: BTreeMap<&str, Vec<(&str, u64)>> = BTreeMap::new();
    for r in records {
        per_repo.entry(&r.repo_name).or_default().push((&r.language, r.bytes));
    }
    let total = per_repo.len();
    let map: BTreeMap<String, (String, u64)> = per_repo
        .into_iter()
        .filter(|(_, langs)| langs.len() == 1)
        .map(|(repo, langs)| (repo.to_string(), (langs[0].0.to_string(), langs[0].1)))
        .collect();
    let retained_fraction = if total == 0 { 0.0 } else { map.len() as f64 / total as f64 };
    SingleLanguageRepos { map, retained_fraction }
}

/// Primary-language assignment for every user with at least one qualifying
/// contribution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UserLanguageMap {
    pub rule: Rule,
    assignments: BTreeMap<String, String>,
}

impl UserLanguageMap {
    pub fn get(&self, login: &str) -> Option<&str> {
        self.assignments.get(login).map(String::as_str)
    }

    pub fn assignments(&self) -> &BTreeMap<String, String> {
        &self.assignments
    }

    pub fn len(&self) -> usize {
        self.assignments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignments.is_empty()
    }
}

/// Distinct single-language repos each user contributed to.
fn repos_per_user<'a>(
    commits: &'a [CommitRecord],
    repos: &SingleLanguageRepos,
) -> BTreeMap<&'a str, BTreeSet<&'a str>> {
    let mut out: BTreeMap<&str, BTreeSet<&str>> = BTreeMap::new();
    for c in commits {
        if repos.map.contains_key(&c.repo_name) {
            out.entry(&c.user_login).or_default().insert(&c.repo_name);
        }
    }
    out
}

/// Largest value wins; equal values fall back to the smaller language name.
fn argmax_language<V: PartialOrd + Copy>(scores: &BTreeMap<&str, V>) -> Option<String> {
    let mut best: Option<(&str, V)> = None;
    for (&lang, &score) in scores {
        match &best {
            Some((_, bs)) if score <= *bs => {}
            _ => best = Some((lang, score)),
        }
    }
    best.map(|(lang, _)| lang.to_string())
}

/// Rule 1: language of the contributed repo with the largest byte count.
pub fn rule1_bytes(commits: &[CommitRecord], repos: &SingleLanguageRepos) -> UserLanguageMap {
    let mut assignments = BTreeMap::new();
    for (user, touched) in repos_per_user(commits, repos) {
        let mut best: Option<(u64, &str)> = None;
        for repo in touched {
            let (lang, bytes) = &repos.map[repo];
            let better = match &best {
                None => true,
                Some((b, l)) => *bytes > *b || (*bytes == *b && lang.as_str() < *l),
            };
            if better {
                best = Some((*bytes, lang));
            }
        }
        if let Some((_, lang)) = best {
            assignments.insert(user.to_string(), lang.to_string());
        }
    }
    UserLanguageMap { rule: Rule::Bytes, assignments }
}

/// Rule 2: language collecting the most of the user's commits.
pub fn rule2_commits(commits: &[CommitRecord], repos: &SingleLanguageRepos) -> UserLanguageMap {
    let mut per_user: BTreeMap<&str, BTreeMap<&str, u64>> = BTreeMap::new();
    for c in commits {
        if let Some((lang, _)) = repos.map.get(&c.repo_name) {
            *per_user
                .entry(&c.user_login)
                .or_default()
                .entry(lang.as_str())
                .or_insert(0) += 1;
        }
    }
    let assignments = per_user
        .into_iter()
        .filter_map(|(user, counts)| {
            argmax_language(&counts).map(|lang| (user.to_string(), lang))
        })
        .collect();
    UserLanguageMap { rule: Rule::Commits, assignments }
}

/// Rule 3: mode over the distinct repos the user touched — each repo votes
/// once regardless of how many commits it received.
pub fn rule3_majority(commits: &[CommitRecord], repos: &SingleLanguageRepos) -> UserLanguageMap {
    let mut assignments = BTreeMap::new();
    for (user, touched) in repos_per_user(commits, repos) {
        let mut votes: BTreeMap<&str, u64> = BTreeMap::new();
        for repo in touched {
            let (lang, _) = &repos.map[repo];
            *votes.entry(lang.as_str()).or_insert(0) += 1;
        }
        if let Some(lang) = argmax_language(&votes) {
            assignments.insert(user.to_string(), lang);
        }
    }
    UserLanguageMap { rule: Rule::Majority, assignments }
}

/// Rule 4: owners take the majority language of the repos they own (owner =
/// the `owner/` prefix of the repo name); everyone else falls back to the
/// bytes rule.
pub fn rule4_ownership(commits: &[CommitRecord], repos: &SingleLanguageRepos) -> UserLanguageMap {
    let fallback = rule1_bytes(commits, repos);
    let mut assignments = BTreeMap::new();
    for (user, touched) in repos_per_user(commits, repos) {
        let mut votes: BTreeMap<&str, u64> = BTreeMap::new();
        for repo in touched {
            if repo_owner(repo) == Some(user) {
                let (lang, _) = &repos.map[repo];
                *votes.entry(lang.as_str()).or_insert(0) += 1;
            }
        }
        let lang = match argmax_language(&votes) {
            Some(owned_majority) => Some(owned_majority),
            None => fallback.get(user).map(str::to_string),
        };
        if let Some(lang) = lang {
            assignments.insert(user.to_string(), lang);
        }
    }
    UserLanguageMap { rule: Rule::Ownership, assignments }
}

fn repo_owner(repo_name: &str) -> Option<&str> {
    repo_name.split_once('/').map(|(owner, _)| owner)
}

/// Dispatch by rule id.
pub fn assign_languages(
    rule: Rule,
    commits: &[CommitRecord],
    repos: &SingleLanguageRepos,
) -> UserLanguageMap {
    match rule {
        Rule::Bytes => rule1_bytes(commits, repos),
        Rule::Commits => rule2_commits(commits, repos),
        Rule::Majority => rule3_majority(commits, repos),
        Rule::Ownership => rule4_ownership(commits, repos),
    }
}

/// Fraction of users assigned each language; fractions sum to 1.
pub fn language_proportions(map: &UserLanguageMap) -> BTreeMap<String, f64> {
    let total = map.assignments.len() as f64;
    let mut counts: BTreeMap<String, usize> = BTreeMap::new();
    for lang in map.assignments.values() {
        *counts.entry(lang.clone()).or_insert(0) += 1;
    }
    counts
        .into_iter()
        .map(|(lang, count)| (lang, count as f64 / total))
        .collect()
}

/// Distinct assigned languages per community; unlabeled members are ignored
/// and communities with no labeled member at all are flagged.
#[derive(Debug, Clone, Serialize)]
pub struct DistinctLanguageCounts {
    /// Indexed by community id.
    pub counts: Vec<usize>,
    pub unlabeled_communities: Vec<usize>,
}

pub fn distinct_languages_per_community(
    p: &Partition,
    node_language: &[Option<String>],
) -> DistinctLanguageCounts {
    assert_eq!(p.node_count(), node_language.len(), "one language slot per node");
    let mut per_community: Vec<BTreeSet<&str>> = vec![BTreeSet::new(); p.community_count()];
    for (node, lang) in node_language.iter().enumerate() {
        if let Some(lang) = lang {
            per_community[p.label(node)].insert(lang.as_str());
        }
    }
    let counts: Vec<usize> = per_community.iter().map(BTreeSet::len).collect();
    let unlabeled_communities = counts
        .iter()
        .enumerate()
        .filter(|(_, &c)| c == 0)
        .map(|(i, _)| i)
        .collect();
    DistinctLanguageCounts { counts, unlabeled_communities }
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::NaiveDate;

    fn commit(repo: &str, login: &str) -> CommitRecord {
        CommitRecord {
            repo_name: repo.to_string(),
            user_login: login.to_string(),
            date: NaiveDate::from_ymd_opt(2019, 1, 1).unwrap(),
            lines_added: 1,
            lines_deleted: 0,
        }
    }

    fn lang(repo: &str, language: &str, bytes: u64) -> RepoLanguageRecord {
        RepoLanguageRecord {
            repo_name: repo.to_string(),
            language: language.to_string(),
            bytes,
        }
    }

    #[test]
    fn single_language_filter_keeps_and_reports() {
        let records = vec![
            lang("r1", "Python", 100),
            lang("r2", "C", 10),
            lang("r2", "C++", 20),
            lang("r3", "Java", 50),
        ];
        let repos = single_language_repos(&records);
        assert_eq!(repos.len(), 2);
        assert_eq!(repos.language_of("r1"), Some("Python"));
        assert_eq!(repos.language_of("r2"), None);
        assert!((repos.retained_fraction - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn seven_of_ten_single_language_reports_point_seven() {
        let mut records = Vec::new();
        for i in 0..7 {
            records.push(lang(&format!("s{i}"), "Go", 10));
        }
        for i in 0..3 {
            records.push(lang(&format!("m{i}"), "Go", 10));
            records.push(lang(&format!("m{i}"), "C", 10));
        }
        let repos = single_language_repos(&records);
        assert!((repos.retained_fraction - 0.7).abs() < 1e-12);
    }

    #[test]
    fn bytes_rule_picks_the_heaviest_repo() {
        let repos = single_language_repos(&[lang("p", "Python", 500), lang("j", "Java", 900)]);
        let commits = vec![commit("p", "u"), commit("j", "u")];
        let map = rule1_bytes(&commits, &repos);
        assert_eq!(map.get("u"), Some("Java"));
    }

    #[test]
    fn bytes_rule_single_repo_user() {
        let repos = single_language_repos(&[lang("p", "Python", 500)]);
        let map = rule1_bytes(&[commit("p", "u")], &repos);
        assert_eq!(map.get("u"), Some("Python"));
    }

    #[test]
    fn bytes_rule_breaks_ties_lexicographically() {
        let repos = single_language_repos(&[lang("a", "Python", 700), lang("b", "Java", 700)]);
        let commits = vec![commit("a", "u"), commit("b", "u")];
        let map = rule1_bytes(&commits, &repos);
        assert_eq!(map.get("u"), Some("Java"));
    }

    #[test]
    fn commits_rule_counts_commits_per_language() {
        let repos = single_language_repos(&[
            lang("p1", "Python", 1),
            lang("p2", "Python", 1),
            lang("j", "Java", 1),
        ]);
        let mut commits = Vec::new();
        for _ in 0..3 {
            commits.push(commit("p1", "u"));
        }
        for _ in 0..2 {
            commits.push(commit("p2", "u"));
        }
        for _ in 0..3 {
            commits.push(commit("j", "u"));
        }
        let map = rule2_commits(&commits, &repos);
        assert_eq!(map.get("u"), Some("Python")); // 5 Python vs 3 Java
    }

    #[test]
    fn commits_rule_tie_goes_lexicographic() {
        let repos = single_language_repos(&[lang("p", "Python", 1), lang("j", "Java", 1)]);
        let commits = vec![commit("p", "u"), commit("p", "u"), commit("j", "u"), commit("j", "u")];
        let map = rule2_commits(&commits, &repos);
        assert_eq!(map.get("u"), Some("Java"));
    }

    #[test]
    fn commits_rule_single_commit() {
        let repos = single_language_repos(&[lang("r", "Ruby", 1)]);
        let map = rule2_commits(&[commit("r", "u")], &repos);
        assert_eq!(map.get("u"), Some("Ruby"));
    }

    #[test]
    fn majority_rule_votes_once_per_repo() {
        let repos = single_language_repos(&[
            lang("p1", "Python", 1),
            lang("p2", "Python", 1),
            lang("j", "Java", 1),
        ]);
        let commits = vec![commit("p1", "u"), commit("p2", "u"), commit("j", "u")];
        let map = rule3_majority(&commits, &repos);
        assert_eq!(map.get("u"), Some("Python"));
    }

    #[test]
    fn majority_rule_ignores_commit_multiplicity_unlike_commits_rule() {
        // Same user, commit counts 1/1/100: the commits rule flips to Java
        // while the majority rule keeps voting by repo.
        let repos = single_language_repos(&[
            lang("p1", "Python", 1),
            lang("p2", "Python", 1),
            lang("j", "Java", 1),
        ]);
        let mut commits = vec![commit("p1", "u"), commit("p2", "u")];
        for _ in 0..100 {
            commits.push(commit("j", "u"));
        }
        let majority = rule3_majority(&commits, &repos);
        let by_commits = rule2_commits(&commits, &repos);
        assert_eq!(majority.get("u"), Some("Python"));
        assert_eq!(by_commits.get("u"), Some("Java"));
    }

    #[test]
    fn ownership_rule_overrides_contribution_profile() {
        let repos = single_language_repos(&[
            lang("me/j1", "Java", 1),
            lang("me/j2", "Java", 1),
            lang("other/p1", "Python", 900),
            lang("other/p2", "Python", 900),
            lang("other/p3", "Python", 900),
        ]);
        let commits = vec![
            commit("me/j1", "me"),
            commit("me/j2", "me"),
            commit("other/p1", "me"),
            commit("other/p2", "me"),
            commit("other/p3", "me"),
        ];
        let map = rule4_ownership(&commits, &repos);
        assert_eq!(map.get("me"), Some("Java"));
    }

    #[test]
    fn ownership_rule_falls_back_to_bytes() {
        let repos = single_language_repos(&[lang("boss/r", "Go", 10)]);
        let map = rule4_ownership(&[commit("boss/r", "worker")], &repos);
        assert_eq!(map.get("worker"), Some("Go"));
    }

    #[test]
    fn ownership_rule_breaks_owned_ties_lexicographically() {
        let repos = single_language_repos(&[lang("me/a", "Rust", 1), lang("me/b", "Go", 1)]);
        let commits = vec![commit("me/a", "me"), commit("me/b", "me")];
        let map = rule4_ownership(&commits, &repos);
        assert_eq!(map.get("me"), Some("Go"));
    }

    #[test]
    fn rules_agree_for_single_repo_users() {
        let repos = single_language_repos(&[lang("me/solo", "Elixir", 42)]);
        let commits = vec![commit("me/solo", "me")];
        for rule in Rule::ALL {
            let map = assign_languages(rule, &commits, &repos);
            assert_eq!(map.get("me"), Some("Elixir"), "rule {rule:?}");
        }
    }

    #[test]
    fn proportions_sum_to_one() {
        let repos = single_language_repos(&[
            lang("p", "Python", 1),
            lang("q", "Python", 1),
            lang("r", "Rust", 1),
        ]);
        let commits = vec![
            commit("p", "a"),
            commit("q", "b"),
            commit("r", "c"),
        ];
        let map = rule1_bytes(&commits, &repos);
        let props = language_proportions(&map);
        let total: f64 = props.values().sum();
        assert!((total - 1.0).abs() < 1e-12);
        assert!((props["Python"] - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn single_user_proportion_is_one() {
        let repos = single_language_repos(&[lang("r", "Zig", 1)]);
        let map = rule1_bytes(&[commit("r", "only")], &repos);
        let props = language_proportions(&map);
        assert_eq!(props.len(), 1);
        assert_eq!(props["Zig"], 1.0);
    }

    #[test]
    fn distinct_language_counts_per_community() {
        let p = Partition::from_labels(&[0, 0, 0, 1, 1, 2]);
        let langs = vec![
            Some("Python".to_string()),
            Some("Python".to_string()),
            Some("Java".to_string()),
            Some("Python".to_string()),
            None,
            None,
        ];
        let out = distinct_languages_per_community(&p, &langs);
        assert_eq!(out.counts, vec![2, 1, 0]);
        assert_eq!(out.unlabeled_communities, vec![2]);
    }

    #[test]
    fn all_same_language_community_counts_one() {
        let p = Partition::from_labels(&[0, 0, 0]);
        let langs = vec![Some("Python".to_string()); 3];
        let out = distinct_languages_per_community(&p, &langs);
        assert_eq!(out.counts, vec![1]);
        assert!(out.unlabeled_communities.is_empty());
    }
}
