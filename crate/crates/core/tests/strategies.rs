use restree::execution::{compose_request, execute, Transport, VirtualClock};
use restree::generation::{BfsStrategy, Strategy, TopoStrategy, TreeStrategy, ValueSource};
use restree::mock::MockKind;
use restree::{parse_spec, AnnotationTable, FormatHint, Method, ScoreParams, Session};

fn session(kind: MockKind, seed: u64) -> Session {
    let spec = parse_spec(kind.document().as_bytes(), FormatHint::Auto).unwrap();
    Session::new(spec, AnnotationTable::default(), Default::default(), ScoreParams::default(), 128, seed)
}

fn step(strategy: &mut dyn Strategy, session: &mut Session, transport: &mut dyn Transport) -> restree::TestCase {
    let case = strategy.next_case(session).unwrap();
    let op = &session.spec.operations[case.operation];
    let req = compose_request(&case, op, "mock://gitlab", "", None).unwrap();
    let result = execute(&req, transport, &VirtualClock::new());
    strategy.observe(&case, &result, session);
    case
}

#[test]
fn topo_order_puts_producers_first() {
    let s = session(MockKind::Gitlab, 0);
    let topo = TopoStrategy::new(&s);
    let order = &topo.order().order;
    let pos = |path: &str, m: Method| {
        let op = s.spec.operation_index(path, m).unwrap();
        order.iter().position(|&o| o == op).unwrap()
    };
    let mut sorted = order.clone();
    sorted.sort();
    assert_eq!(sorted, (0..s.spec.operations.len()).collect::<Vec<_>>());
    assert!(pos("/projects", Method::Post) < pos("/projects/{id}/branches", Method::Post));
}

#[test]
fn topo_rounds_cover_every_operation_once() {
    let mut s = session(MockKind::Gitlab, 1);
    let mut topo = TopoStrategy::new(&s);
    let mut transport = MockKind::Gitlab.transport();
    let n = s.spec.operations.len();
    let mut seen: Vec<usize> = (0..n).map(|_| step(&mut topo, &mut s, &mut transport).operation).collect();
    assert_eq!(seen, topo.order().order);
    seen.sort();
    seen.dedup();
    assert_eq!(seen.len(), n);
    assert_eq!(step(&mut topo, &mut s, &mut transport).round, 2);
}

#[test]
fn bfs_starts_from_operations_without_producers() {
    let mut s = session(MockKind::Gitlab, 2);
    let mut bfs = BfsStrategy::new(&s);
    let mut transport = MockKind::Gitlab.transport();
    let first = step(&mut bfs, &mut s, &mut transport);
    assert!(s.spec.operations[first.operation].required_params.iter().all(|p| p.name != "id"));
    for _ in 0..200 {
        step(&mut bfs, &mut s, &mut transport);
    }
    assert!(bfs.queue_len() <= 10_000);
}

#[test]
fn tree_reuses_created_resources() {
    let mut s = session(MockKind::Gitlab, 3);
    let mut tree = TreeStrategy::new();
    let mut transport = MockKind::Gitlab.transport();
    let mut pooled = 0;
    for _ in 0..200 {
        let case = step(&mut tree, &mut s, &mut transport);
        if case.path.contains("/branches") && case.binding("id").is_some_and(|b| b.source == ValueSource::Pool) {
            pooled += 1;
        }
    }
    assert!(pooled > 0);
    assert!(s.pool.keys().count() >= 2);
}

#[test]
fn tree_escalates_only_after_required_cases() {
    let mut s = session(MockKind::Gitlab, 4);
    let mut tree = TreeStrategy::new();
    let mut transport = MockKind::Gitlab.transport();
    let mut cases = Vec::new();
    while tree.round() <= 1 {
        cases.push(step(&mut tree, &mut s, &mut transport));
    }
    let get = s.spec.operation_index("/projects", Method::Get).unwrap();
    let positions: Vec<(bool, usize)> = cases
        .iter()
        .enumerate()
        .filter(|(_, c)| c.operation == get && c.round == 1)
        .map(|(i, c)| (c.optional_set.is_empty(), i))
        .collect();
    assert!(positions.len() > 1);
    assert!(positions[0].0, "required-only case comes first");
    assert!(positions[1..].iter().all(|(required, _)| !required));
}
