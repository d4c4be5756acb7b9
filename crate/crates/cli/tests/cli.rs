use exdec_core::decomp::{from_text, to_text, DecompositionResult};
use exdec_core::graph::parse_edge_list;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use tempfile::TempDir;

fn exdec(args: &[&str], threads: Option<&str>) -> Output {
    let mut c = Command::new(env!("CARGO_BIN_EXE_exdec"));
    c.args(args);
    if let Some(t) = threads {
        c.env("EXDEC_THREADS", t);
    }
    c.output().unwrap()
}

fn write(dir: &TempDir, name: &str, body: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, body).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn clique(k: usize) -> String {
    let mut out = String::new();
    for a in 0..k {
        for b in 0..k {
            if a != b {
                out += &format!("{a} {b} 1\n");
            }
        }
    }
    out
}

fn two_cliques(k: usize) -> String {
    let mut out = clique(k);
    for a in 0..k {
        for b in 0..k {
            if a != b {
                out += &format!("{} {} 1\n", a + k, b + k);
            }
        }
    }
    out + &format!("0 {k} 1\n{} 1 1\n", k + 1)
}

/// Pseudo-random strongly connected graph from a fixed seed.
fn mixed_graph(n: usize, m: usize, seed: u64) -> String {
    let mut x = seed;
    let mut next = move || {
        x = x
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        x >> 33
    };
    let mut out = format!("p {n} {}\n", m + n);
    for i in 0..n {
        out += &format!("{i} {} {}\n", (i + 1) % n, 1 + next() % 9);
    }
    let mut k = 0;
    while k < m {
        let (a, b) = ((next() % n as u64) as usize, (next() % n as u64) as usize);
        if a != b {
            out += &format!("{a} {b} {}\n", 1 + next() % 9);
            k += 1;
        }
    }
    out
}

#[test]
fn dag_gives_singletons() {
    let dir = TempDir::new().unwrap();
    let g = write(&dir, "dag.txt", "p 4 4\n0 1 2\n1 2 1\n0 3 5\n3 2 1\n");
    let o = exdec(
        &[
            "decompose",
            "--mode",
            "strong",
            "--phi",
            "0.01",
            "--seed",
            "7",
            s(&g),
        ],
        None,
    );
    assert_eq!(o.status.code(), Some(0));
    let r = from_text(&String::from_utf8(o.stdout).unwrap()).unwrap();
    assert_eq!(r.components.len(), 4);
    assert!(r.components.iter().all(|c| c.vertices.len() == 1));
}

#[test]
fn corrupted_result_fails_verification() {
    let dir = TempDir::new().unwrap();
    let text = two_cliques(4);
    let g = write(&dir, "g.txt", &text);
    let out = dir.path().join("r.txt");
    let o = exdec(
        &[
            "decompose",
            "--phi",
            "0.05",
            "--verify",
            "-o",
            s(&out),
            s(&g),
        ],
        None,
    );
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let o = exdec(&["verify", s(&out), s(&g)], None);
    assert_eq!(o.status.code(), Some(0));
    let graph = parse_edge_list(&text).unwrap();
    let mut r: DecompositionResult = from_text(&std::fs::read_to_string(&out).unwrap()).unwrap();
    r.excluded = (0..graph.m()).collect();
    let bad = write(&dir, "bad.txt", &to_text(&r, &graph));
    let o = exdec(&["verify", s(&bad), s(&g)], None);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8(o.stdout)
        .unwrap()
        .contains("acyclic FAIL cycle ["));
}

#[test]
fn cut_matching_on_k8_traces_potentials() {
    let dir = TempDir::new().unwrap();
    let g = write(&dir, "k8.txt", &clique(8));
    let csv = dir.path().join("psi.csv");
    let o = exdec(
        &[
            "cut-matching",
            "--phi",
            "0.05",
            "--seed",
            "3",
            "--dump-potentials",
            s(&csv),
            s(&g),
        ],
        None,
    );
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.contains("outcome near-expander"));
    let psi: Vec<f64> = text
        .lines()
        .filter_map(|l| l.strip_prefix("psi "))
        .map(|l| l.split_whitespace().nth(1).unwrap().parse().unwrap())
        .collect();
    assert!(psi.len() > 1);
    assert!(psi.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-9)));
    assert_eq!(
        std::fs::read_to_string(&csv).unwrap().lines().count(),
        psi.len() + 1
    );
}

#[test]
fn input_errors_exit_with_two() {
    let dir = TempDir::new().unwrap();
    let g = write(&dir, "bad.txt", "0 1 1\n# comment\n1 x 2\n");
    let o = exdec(&["decompose", s(&g)], None);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8(o.stderr).unwrap().contains("line 3"));
    let ok = write(&dir, "ok.txt", &clique(3));
    assert_eq!(
        exdec(&["decompose", "--phi", "1.5", s(&ok)], None)
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        exdec(&["decompose", "--tau", "10", s(&ok)], None)
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        exdec(&["decompose", "--mode", "medium", s(&ok)], None)
            .status
            .code(),
        Some(2)
    );
    let missing = dir.path().join("nope.txt");
    assert_eq!(
        exdec(&["decompose", s(&missing)], None).status.code(),
        Some(2)
    );
    let junk = write(&dir, "junk.txt", "exdec-decomposition 1\nmode sideways\n");
    assert_eq!(
        exdec(&["verify", s(&junk), s(&ok)], None).status.code(),
        Some(2)
    );
}

#[test]
fn json_mirrors_text() {
    let dir = TempDir::new().unwrap();
    let g = write(&dir, "g.txt", &mixed_graph(14, 30, 5));
    let t = exdec(&["decompose", "--phi", "0.05", "--seed", "2", s(&g)], None);
    let j = exdec(
        &["decompose", "--phi", "0.05", "--seed", "2", "--json", s(&g)],
        None,
    );
    let from_t = from_text(&String::from_utf8(t.stdout).unwrap()).unwrap();
    let from_j: DecompositionResult = serde_json::from_slice(&j.stdout).unwrap();
    assert_eq!(from_t, from_j);
    let jp = write(&dir, "r.json", &String::from_utf8(j.stdout).unwrap());
    assert_eq!(
        exdec(&["verify", s(&jp), s(&g)], None).status.code(),
        Some(0)
    );
}

#[test]
fn output_is_byte_identical_across_runs_and_thread_counts() {
    let dir = TempDir::new().unwrap();
    let g = write(&dir, "g.txt", &mixed_graph(30, 80, 9));
    for mode in ["weak", "strong"] {
        let args = [
            "decompose",
            "--mode",
            mode,
            "--phi",
            "0.05",
            "--seed",
            "13",
            s(&g),
        ];
        let a = exdec(&args, None).stdout;
        let b = exdec(&args, None).stdout;
        let one = exdec(&args, Some("1")).stdout;
        let four = exdec(&args, Some("4")).stdout;
        assert!(!a.is_empty());
        assert_eq!(a, b);
        assert_eq!(a, one);
        assert_eq!(a, four);
    }
}
