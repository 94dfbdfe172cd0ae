use resolve::data::{parse_chart, Dataset};
use resolve::replay::{base_chart, replay_step};
use resolve_core::chart::{covering_check, pullback_check, standard_elements, validate, CoveringOutcome, Tower};
use resolve_core::ideal::Budget;
use resolve_core::poly::{parse, q};

fn ds() -> Dataset {
    Dataset::load_default().unwrap()
}

#[test]
fn every_chart_validates_and_pulls_back() {
    let ds = ds();
    let b = Budget::default();
    for c in ds.tower.charts() {
        let v = validate(c);
        assert!(v.is_valid(), "{}: {:?}", c.name, v.violations);
        if c.parent.is_some() {
            let r = pullback_check(&ds.tower, &c.name, &b).unwrap();
            assert!(r.passed(), "{}: {r:?}", c.name);
            for e in &r.exclusions {
                assert!(e.proof.as_ref().unwrap().leaves().iter().all(|u| u.verify()), "{} exclusion {}", c.name, e.index);
            }
        }
    }
}

#[test]
fn corrupted_substitution_fails_pullback() {
    let ds = ds();
    let t2 = ds.chart("T2").unwrap();
    // d11_2 ↦ d11_3 instead of n3*d11_3: the T2 quadric no longer pulls
    // back into the T3 equations
    let text = std::fs::read_to_string(resolve::data::data_dir().join("T3.json")).unwrap();
    let bad = text.replacen("\"d11_2\": \"n3*d11_3\"", "\"d11_2\": \"d11_3\"", 1);
    assert_ne!(bad, text);
    let t3 = parse_chart("T3.json", &bad, Some(t2)).unwrap();
    let mut charts = ds.tower.charts().to_vec();
    charts.retain(|c| c.name != "T3" && c.name != "T4" && c.name != "T5");
    charts.push(t3);
    let tower = Tower::new(charts);
    let r = pullback_check(&tower, "T3", &Budget::default()).unwrap();
    assert!(!r.passed());
    assert!(r.residuals[0].is_some(), "{r:?}");
}

#[test]
fn weight_typo_is_reported() {
    let ds = ds();
    let t1 = ds.chart("T1").unwrap();
    let text = std::fs::read_to_string(resolve::data::data_dir().join("T2.json")).unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    let mut v = v;
    let vars = v["variables"].as_array_mut().unwrap();
    let d11 = vars.iter_mut().find(|x| x["name"] == "d11_2").unwrap();
    d11["weights"] = serde_json::json!([2, 2, 1]);
    let c = parse_chart("T2.json", &v.to_string(), Some(t1)).unwrap();
    assert!(!validate(&c).is_valid());
}

#[test]
fn early_steps_replay_exactly() {
    let ds = ds();
    let b = Budget::default();
    for k in 1..=5 {
        let step = ds.step(k).unwrap();
        let cmp = replay_step(&ds, step, &b).unwrap();
        assert_eq!(cmp.len(), step.orders.len());
        for c in &cmp {
            assert!(c.isomorphic(), "step {k}: {c:?}");
        }
    }
    // T1 from T0: carried coordinates get the next index, fresh names stay
    let c = &replay_step(&ds, ds.step(2).unwrap(), &b).unwrap()[0];
    assert!(c.exclusions_syntactic);
    for (a, b) in &c.renaming {
        match a.strip_suffix("_0") {
            Some(stem) => assert_eq!(*b, format!("{stem}_1")),
            None => assert_eq!(a, b),
        }
    }
    // step 4 has both center orders
    assert_eq!(ds.step(4).unwrap().orders.len(), 2);
}

#[test]
fn step_four_base_is_restricted_to_the_open_set() {
    let ds = ds();
    let step = ds.step(4).unwrap();
    let base = base_chart(&ds, step).unwrap();
    let t2 = ds.chart("T2").unwrap();
    assert_eq!(base.reg.len(), t2.reg.len());
    let a23 = parse("a23_2", &base.reg).unwrap();
    assert!(base.excluded.iter().any(|e| e.generators() == [a23.clone()]));
}

#[test]
fn shipped_elements_are_the_standard_ones() {
    let ds = ds();
    let std = standard_elements().unwrap();
    assert_eq!(ds.elements.len(), std.len());
    for ((n, e), (m, f)) in ds.elements.iter().zip(&std) {
        assert_eq!(n, m);
        assert_eq!(e, f, "{n}");
    }
}

#[test]
fn saturation_cover_on_t1() {
    let ds = ds();
    let b = Budget::default();
    let c = ds.chart(&ds.covering.chart).unwrap();
    assert_eq!(c.name, "T1");
    let open = parse(&ds.covering.open, &c.reg).unwrap();
    let all: Vec<_> = ds.elements.iter().map(|(_, e)| e.clone()).collect();
    match covering_check(&ds.tower, "T1", &open, &all, &b).unwrap() {
        CoveringOutcome::Covered { targets, proof } => {
            assert_eq!(targets.len(), 6);
            assert!(c.cover_problem(targets).verify(&proof));
        }
        other => panic!("{other:?}"),
    }
    match covering_check(&ds.tower, "T1", &open, &all[..4], &b).unwrap() {
        CoveringOutcome::Refuted { targets, point } => {
            let get = |n: &str| point.iter().find(|(m, _)| m == n).unwrap().1.clone();
            assert_eq!(get("l1"), q(0));
            assert_ne!(get("a33_1"), q(0));
            assert_ne!(get("P1"), q(0));
            for (n, v) in &point {
                if !["a33_1", "P1"].contains(&n.as_str()) {
                    assert_eq!(*v, q(0), "{n}");
                }
            }
            let values: Vec<_> = point.iter().map(|(_, v)| v.clone()).collect();
            assert!(c.cover_problem(targets).is_witness_point(&values));
        }
        other => panic!("{other:?}"),
    }
}
