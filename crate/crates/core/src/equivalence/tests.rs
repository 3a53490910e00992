use super::*;
use crate::formulas::{generate_fragment, parse};
use crate::semantics::satisfies;
use crate::structures::{Element, FiniteStructure, PeriodicSet, PeriodicUnaryStructure, Signature};
use proptest::prelude::*;

fn unary_sig(eq: bool) -> Signature {
    Signature::new([("R", 1)], eq).unwrap()
}

fn unary(n: usize, r: &[Element], eq: bool) -> Structure {
    FiniteStructure::new(
        unary_sig(eq),
        n,
        [("R", r.iter().map(|&e| vec![e]).collect::<Vec<_>>())],
    )
    .unwrap()
    .into()
}

fn periodic(sig: Signature, prefix: &str, cycle: &str) -> Structure {
    PeriodicUnaryStructure::new(sig, [("R", PeriodicSet::from_bits(prefix, cycle).unwrap())])
        .unwrap()
        .into()
}

fn family(sig: &Signature, lines: &[&str]) -> FormulaSet {
    FormulaSet::new(sig.clone(), lines.iter().map(|l| parse(l, sig).unwrap()).collect()).unwrap()
}

fn rs_sig() -> Signature {
    Signature::new([("R", 1), ("S", 2)], true).unwrap()
}

fn rs(n: usize, r: &[Element], s: &[(Element, Element)]) -> Structure {
    FiniteStructure::new(
        rs_sig(),
        n,
        [
            ("R", r.iter().map(|&e| vec![e]).collect::<Vec<_>>()),
            ("S", s.iter().map(|&(a, b)| vec![a, b]).collect()),
        ],
    )
    .unwrap()
    .into()
}

/// Isomorphism by trying every permutation.
fn brute_iso(m: &Structure, n: &Structure) -> bool {
    let size = m.as_finite().unwrap().size();
    size == n.as_finite().unwrap().size() && Permutation::all(size).any(|g| act(&g, m).unwrap() == *n)
}

#[test]
fn distinguishable_examples() {
    let sig = unary_sig(false);
    let a = family(&sig, &["R(v0)"]);
    let d = distinguishable(&unary(4, &[0, 1], false), &unary(4, &[0, 1, 2], false), &a)
        .unwrap()
        .unwrap();
    assert_eq!((d.index, d.left, d.right), (0, Count::Finite(2), Count::Finite(3)));
    assert_eq!(d.formula.to_string(), "R(v0)");

    let m = unary(4, &[3], false);
    assert_eq!(distinguishable(&m, &m, &a).unwrap(), None);

    let both = family(&sig, &["R(v0)", "~R(v0)"]);
    let evens = periodic(sig.clone(), "", "10");
    let odds = periodic(sig.clone(), "", "01");
    assert_eq!(distinguishable(&evens, &odds, &both).unwrap(), None);
}

#[test]
fn distinguishing_formula_is_first_in_list_order() {
    let sig = unary_sig(false);
    let a = family(&sig, &["E v0. R(v0)", "~R(v0)", "R(v0)"]);
    let d = distinguishable(&unary(4, &[0], false), &unary(4, &[0, 1], false), &a)
        .unwrap()
        .unwrap();
    assert_eq!(d.index, 1);
    assert_eq!((d.left, d.right), (Count::Finite(3), Count::Finite(2)));
}

#[test]
fn e_equiv_examples() {
    let sig = unary_sig(false);
    let a = family(&sig, &["R(v0)", "~R(v0)"]);
    let m = periodic(sig.clone(), "111", "0");
    let n = periodic(sig.clone(), "0001011", "0");
    let r = e_equiv(&m, &n, &a).unwrap();
    assert!(r.verdict && r.witness.is_none());
    assert_eq!(r.relation.to_string(), "E_A");

    let one = family(&sig, &["R(v0)"]);
    let r = e_equiv(&unary(3, &[0], false), &unary(3, &[0, 1], false), &one).unwrap();
    assert!(!r.verdict);
    assert!(matches!(r.witness, Some(Witness::Distinction(_))));
}

#[test]
fn mismatches_are_errors() {
    let sig = unary_sig(false);
    let a = family(&sig, &["R(v0)"]);
    let fin = unary(2, &[0], false);
    let per = periodic(sig, "1", "0");
    assert!(matches!(e_equiv(&fin, &per, &a), Err(EquivError::BackendMismatch(..))));
    assert!(matches!(
        isomorphic(&fin, &unary(2, &[0], true)),
        Err(EquivError::SignatureMismatch(..))
    ));
    assert!(matches!(
        e_equiv(&rs(2, &[], &[]), &rs(2, &[], &[]), &a),
        Err(EquivError::SignatureMismatch(..))
    ));
}

#[test]
fn isomorphism_examples() {
    let sig = unary_sig(false);
    let m = periodic(sig.clone(), "111", "0");
    let n = periodic(sig.clone(), "00000111", "0");
    let r = isomorphic(&m, &n).unwrap();
    assert!(r.verdict);
    let Some(Witness::Isomorphism(g)) = r.witness else {
        panic!("missing witness")
    };
    assert_eq!((0..6).map(|m| g.apply(m)).collect::<Vec<_>>(), vec![5, 6, 7, 0, 1, 2]);
    assert_eq!(g.apply(8), 8);
    assert_eq!(act(&g, &m).unwrap(), n);

    assert!(
        !isomorphic(&unary(3, &[0], false), &unary(3, &[0, 1], false))
            .unwrap()
            .verdict
    );

    let s_sig = Signature::new([("S", 2)], false).unwrap();
    let a: Structure = FiniteStructure::new(s_sig.clone(), 2, [("S", vec![vec![0, 1]])])
        .unwrap()
        .into();
    let b: Structure = FiniteStructure::new(s_sig, 2, [("S", vec![vec![1, 0]])])
        .unwrap()
        .into();
    let r = isomorphic(&a, &b).unwrap();
    assert_eq!(r.witness, Some(Witness::Isomorphism(Permutation::Listed(vec![1, 0]))));
}

#[test]
fn periodic_isomorphism_needs_matching_classes() {
    let sig = unary_sig(false);
    let evens = periodic(sig.clone(), "", "10");
    let odds = periodic(sig.clone(), "", "01");
    let thirds = periodic(sig.clone(), "", "100");
    let cofinite = periodic(sig.clone(), "0", "1");
    assert!(isomorphic(&evens, &odds).unwrap().verdict);
    assert!(isomorphic(&evens, &thirds).unwrap().verdict);
    assert!(!isomorphic(&evens, &cofinite).unwrap().verdict);
    let Some(Witness::Isomorphism(g)) = isomorphic(&evens, &thirds).unwrap().witness else {
        panic!()
    };
    assert_eq!(act(&g, &evens).unwrap(), thirds);
    assert_eq!(act(&g.inverse(), &thirds).unwrap(), evens);
}

#[test]
fn act_examples() {
    let m = unary(2, &[0], false);
    assert_eq!(
        act(&Permutation::transposition(2, 0, 1), &m).unwrap(),
        unary(2, &[1], false)
    );
    assert_eq!(act(&Permutation::identity(2), &m).unwrap(), m);
    assert!(matches!(
        act(&Permutation::identity(3), &m),
        Err(EquivError::NotABijection(_))
    ));
    assert!(Permutation::from_images(vec![0, 0]).is_err());
    assert!(Permutation::from_images(vec![1, 2]).is_err());

    let evens = periodic(unary_sig(false), "", "10");
    let swapped = act(&Permutation::transposition(2, 0, 1), &evens).unwrap();
    assert_eq!(swapped, periodic(unary_sig(false), "01", "10"));
}

#[test]
fn act_composes() {
    let m = rs(3, &[0, 2], &[(0, 1), (1, 1), (2, 0)]);
    let perms: Vec<_> = Permutation::all(3).collect();
    assert_eq!(perms.len(), 6);
    for g in &perms {
        for h in &perms {
            let gh = g.compose(h).unwrap();
            assert_eq!(act(g, &act(h, &m).unwrap()).unwrap(), act(&gh, &m).unwrap());
        }
        assert_eq!(g.compose(&g.inverse()).unwrap(), Permutation::identity(3));
    }
}

#[test]
fn ef_examples() {
    let m = unary(10, &[0, 1, 2, 3, 4], true);
    assert!(ef_equiv(&m, &m, 3).unwrap().verdict);
    let n = unary(12, &[0, 1, 2, 3, 4, 5], true);
    assert!(ef_equiv(&m, &n, 3).unwrap().verdict);

    let one = unary(3, &[0], true);
    let two = unary(3, &[0, 1], true);
    let r = ef_equiv(&one, &two, 2).unwrap();
    assert!(!r.verdict);
    assert_eq!(r.relation.to_string(), "ef_rank_2");
    let Some(Witness::Spoiler(line)) = r.witness else {
        panic!("missing trace")
    };
    assert!(!line.is_empty() && line.len() <= 2);
    assert!(ef_equiv(&one, &two, 1).unwrap().verdict);
}

#[test]
fn ef_on_periodic_structures() {
    let sig = unary_sig(true);
    let three = periodic(sig.clone(), "111", "0");
    let four = periodic(sig.clone(), "1111", "0");
    assert!(ef_equiv(&three, &four, 3).unwrap().verdict);
    let r = ef_equiv(&three, &four, 4).unwrap();
    assert!(!r.verdict);
    let Some(Witness::Spoiler(line)) = r.witness else {
        panic!()
    };
    assert_eq!(line.len(), 4);
    assert!(line.iter().all(|mv| mv.side == Side::Right));
    assert_eq!(line[3].response, None);

    let plain = unary_sig(false);
    let a = periodic(plain.clone(), "1", "0");
    let b = periodic(plain.clone(), "11111", "0");
    assert!(ef_equiv(&a, &b, 5).unwrap().verdict);
    assert!(!ef_equiv(&a, &periodic(plain, "", "0"), 1).unwrap().verdict);
}

#[test]
fn classify_unary_three() {
    let sig = unary_sig(false);
    let all: Vec<Structure> = (0..8u32)
        .map(|mask| unary(3, &(0..3).filter(|&i| mask >> i & 1 == 1).collect::<Vec<_>>(), false))
        .collect();
    let a = family(&sig, &["R(v0)"]);
    assert_eq!(classify(&all, Relation::EA(&a)).unwrap().len(), 4);
    assert_eq!(classify(&all, Relation::Iso).unwrap().len(), 4);
    // one round sees only whether R and its complement are inhabited
    assert_eq!(classify(&all, Relation::Ef(1)).unwrap().len(), 3);
    assert_eq!(classify(&all, Relation::Ef(0)).unwrap().len(), 1);
    let p = classify_with(
        &all,
        Relation::Iso,
        ClassifyOptions {
            parallel: true,
            budget: None,
        },
    )
    .unwrap();
    assert_eq!(p.classes()[0], vec![0]);
    assert_eq!(p.classes()[1], vec![1, 2, 4]);
    assert_eq!(p.class_of(6), Some(2));
}

#[test]
fn budget_is_enforced() {
    let m = rs(4, &[0, 1], &[(0, 1), (1, 0)]);
    let n = rs(4, &[2, 3], &[(3, 2), (2, 3)]);
    assert!(matches!(
        isomorphic_with_budget(&m, &n, Some(1)),
        Err(EquivError::BudgetExceeded(1))
    ));
    assert!(isomorphic_with_budget(&m, &n, Some(1000)).unwrap().verdict);
    assert!(matches!(
        ef_equiv_with_budget(&m, &n, 3, Some(1)),
        Err(EquivError::BudgetExceeded(1))
    ));
}

#[test]
fn hierarchy_on_small_pair() {
    let sig = rs_sig();
    let a = generate_fragment(&sig, 1, 2).unwrap();
    let m = rs(3, &[0], &[(0, 1)]);
    let n = rs(3, &[2], &[(2, 0)]);
    let h = check_hierarchy(&m, &n, &a).unwrap();
    assert!(h.isomorphic && h.e_equivalent && h.disagreement.is_none() && h.holds());
    let h = check_hierarchy(&m, &rs(3, &[2], &[(0, 2)]), &a).unwrap();
    assert!(!h.isomorphic && h.holds());
}

fn arb_rs(n: usize) -> impl Strategy<Value = Structure> {
    (
        prop::collection::vec(any::<bool>(), n),
        prop::collection::vec(any::<bool>(), n * n),
    )
        .prop_map(move |(r, s)| {
            let r: Vec<Element> = (0..n).filter(|&i| r[i]).collect();
            let s: Vec<(Element, Element)> = (0..n * n).filter(|&i| s[i]).map(|i| (i / n, i % n)).collect();
            rs(n, &r, &s)
        })
}

fn arb_perm(n: usize) -> impl Strategy<Value = Permutation> {
    Just((0..n).collect::<Vec<_>>())
        .prop_shuffle()
        .prop_map(|v| Permutation::from_images(v).unwrap())
}

fn truncate(m: &PeriodicUnaryStructure, q: usize) -> Structure {
    let bound = m.finite_bound() + m.period() * q.max(1);
    FiniteStructure::new(
        m.signature().clone(),
        bound,
        [(
            "R",
            (0..bound)
                .filter(|&e| m.holds(0, e))
                .map(|e| vec![e])
                .collect::<Vec<_>>(),
        )],
    )
    .unwrap()
    .into()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn iso_matches_brute_force(n in 1usize..=4, seed in any::<u64>()) {
        let mut rng = <rand::rngs::StdRng as rand::SeedableRng>::seed_from_u64(seed);
        let runner = |rng: &mut rand::rngs::StdRng| {
            use rand::Rng;
            let r: Vec<Element> = (0..n).filter(|_| rng.gen_bool(0.5)).collect();
            let s: Vec<(Element, Element)> = (0..n * n).filter(|_| rng.gen_bool(0.3)).map(|i| (i / n, i % n)).collect();
            rs(n, &r, &s)
        };
        let m = runner(&mut rng);
        // half the time compare against a relabeled copy
        let other = if seed % 2 == 0 {
            let perms: Vec<_> = Permutation::all(n).collect();
            act(&perms[(seed / 2) as usize % perms.len()], &m).unwrap()
        } else {
            runner(&mut rng)
        };
        let r = isomorphic(&m, &other).unwrap();
        prop_assert_eq!(r.verdict, brute_iso(&m, &other));
        if let Some(Witness::Isomorphism(g)) = r.witness {
            prop_assert_eq!(act(&g, &m).unwrap(), other);
        }
    }

    #[test]
    fn e_equiv_is_an_equivalence(a in arb_rs(3), b in arb_rs(3), c in arb_rs(3)) {
        let family = generate_fragment(&rs_sig(), 1, 2).unwrap();
        let e = |x: &Structure, y: &Structure| e_equiv(x, y, &family).unwrap().verdict;
        prop_assert!(e(&a, &a));
        prop_assert_eq!(e(&a, &b), e(&b, &a));
        if e(&a, &b) && e(&b, &c) {
            prop_assert!(e(&a, &c));
        }
    }

    #[test]
    fn distinguishability_is_invariant_under_action(m in arb_rs(3), n in arb_rs(3), g in arb_perm(3)) {
        let family = generate_fragment(&rs_sig(), 1, 2).unwrap();
        let moved = act(&g, &m).unwrap();
        prop_assert_eq!(distinguishable(&m, &n, &family).unwrap(), distinguishable(&moved, &n, &family).unwrap());
        prop_assert!(isomorphic(&m, &moved).unwrap().verdict);
        prop_assert!(ef_equiv(&m, &moved, 2).unwrap().verdict);
    }

    /// A spoiler line replayed from the start ends in a position where the
    /// pebbled map breaks an atom or equality.
    #[test]
    fn spoiler_lines_end_in_a_broken_map(m in arb_rs(3), n in arb_rs(3), q in 1u32..=2) {
        let r = ef_equiv(&m, &n, q).unwrap();
        if let Some(Witness::Spoiler(line)) = r.witness {
            prop_assert!(line.len() <= q as usize);
            let last = line.last().unwrap();
            let pebbles: Vec<(Element, Element)> = line[..line.len() - 1]
                .iter()
                .map(|mv| match mv.side {
                    Side::Left => (mv.element, mv.response.unwrap()),
                    Side::Right => (mv.response.unwrap(), mv.element),
                })
                .collect();
            // oracle: the last spoiler move has no answer that preserves every atom
            let (fm, fn_) = (m.as_finite().unwrap(), n.as_finite().unwrap());
            let preserved = |p: &[(Element, Element)]| {
                p.iter().all(|&(a, b)| p.iter().all(|&(c, d)| {
                    (a == c) == (b == d) && fm.holds(1, &[a, c]) == fn_.holds(1, &[b, d])
                }) && fm.holds(0, &[a]) == fn_.holds(0, &[b]))
            };
            let answers = (0..3).filter(|&y| {
                let mut p = pebbles.clone();
                p.push(match last.side { Side::Left => (last.element, y), Side::Right => (y, last.element) });
                preserved(&p)
            }).count();
            if line.len() == q as usize {
                prop_assert_eq!(answers, 0);
            }
        } else {
            prop_assert!(r.verdict);
        }
    }

    /// The color-count rule for periodic structures agrees with the game
    /// searched on truncations that keep every infinite class at least `q` long.
    #[test]
    fn periodic_ef_matches_game_on_truncations(
        a in (prop::collection::vec(any::<bool>(), 0..=4), prop::collection::vec(any::<bool>(), 1..=2)),
        b in (prop::collection::vec(any::<bool>(), 0..=4), prop::collection::vec(any::<bool>(), 1..=2)),
        eq in any::<bool>(),
        q in 0u32..=3,
    ) {
        let sig = unary_sig(eq);
        let mk = |(p, c): (Vec<bool>, Vec<bool>)| {
            PeriodicUnaryStructure::new(sig.clone(), [("R", PeriodicSet::new(p, c).unwrap())]).unwrap()
        };
        let (m, n) = (mk(a), mk(b));
        let fast = ef_equiv(&m.clone().into(), &n.clone().into(), q).unwrap().verdict;
        let slow = ef_equiv(&truncate(&m, q as usize), &truncate(&n, q as usize), q).unwrap().verdict;
        prop_assert_eq!(fast, slow);
    }

    /// E_A-equivalence on sentences of A implies truth agreement.
    #[test]
    fn sentence_counts_decide_truth(m in arb_rs(2), n in arb_rs(2)) {
        let family = generate_fragment(&rs_sig(), 2, 2).unwrap();
        if e_equiv(&m, &n, &family).unwrap().verdict {
            for phi in family.sentences() {
                prop_assert_eq!(satisfies(&m, phi, &[]).unwrap(), satisfies(&n, phi, &[]).unwrap());
            }
        }
    }
}
