use distinguo_core::borel::RemarkEncoding;
use distinguo_core::equivalence::e_equiv;
use distinguo_core::formulas::generate_fragment;
use distinguo_core::semantics::{count, realizations, CompiledFamily, RealizationSet};
use distinguo_core::structures::Element;
use distinguo_core::{Count, FiniteStructure, Formula, Signature, Structure};
use proptest::prelude::*;

fn sig() -> Signature {
    Signature::new([("R", 1), ("S", 2)], true).unwrap()
}

fn structure(n: usize, mask: u64) -> (FiniteStructure, Structure) {
    let r: Vec<Vec<Element>> = (0..n).filter(|&i| mask >> i & 1 == 1).map(|i| vec![i]).collect();
    let s: Vec<Vec<Element>> = (0..n * n)
        .filter(|&i| mask >> (n + i) & 1 == 1)
        .map(|i| vec![i / n, i % n])
        .collect();
    let m = FiniteStructure::new(sig(), n, [("R", r), ("S", s)]).unwrap();
    (m.clone(), m.into())
}

/// Direct recursion over the syntax tree.
fn naive(m: &FiniteStructure, phi: &Formula, env: &mut Vec<Element>) -> bool {
    match phi {
        Formula::Atom { relation, args } => {
            let t: Vec<Element> = args.iter().map(|v| env[v.index()]).collect();
            m.tuples_of(relation).unwrap().contains(&t)
        }
        Formula::Equal(a, b) => env[a.index()] == env[b.index()],
        Formula::Not(f) => !naive(m, f, env),
        Formula::And(fs) => fs.iter().all(|f| naive(m, f, env)),
        Formula::Or(fs) => fs.iter().any(|f| naive(m, f, env)),
        Formula::Exists(v, f) | Formula::Forall(v, f) => {
            let want = matches!(phi, Formula::Exists(..));
            let saved = env[v.index()];
            let mut hit = false;
            for e in 0..m.size() {
                env[v.index()] = e;
                if naive(m, f, env) == want {
                    hit = true;
                    break;
                }
            }
            env[v.index()] = saved;
            hit == want
        }
        Formula::ExistsAtLeast { count, vars, body } => {
            let mut vs: Vec<usize> = vars.iter().map(|v| v.index()).collect();
            vs.sort_unstable();
            vs.dedup();
            let saved = env.clone();
            let mut k = 0;
            for code in 0..m.size().pow(vs.len() as u32) {
                let mut c = code;
                for &v in vs.iter().rev() {
                    env[v] = c % m.size();
                    c /= m.size();
                }
                k += naive(m, body, env) as u64;
            }
            *env = saved;
            k >= *count
        }
    }
}

fn naive_count(m: &FiniteStructure, phi: &Formula) -> u64 {
    let free: Vec<usize> = phi.free_vars().as_slice().iter().map(|v| v.index()).collect();
    let mut env = vec![0; phi.var_span().max(1)];
    (0..m.size().pow(free.len() as u32))
        .filter(|&code| {
            let mut c = code;
            for &v in free.iter().rev() {
                env[v] = c % m.size();
                c /= m.size();
            }
            naive(m, phi, &mut env)
        })
        .count() as u64
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn compiled_family_matches_tree_walk(n in 1usize..=3, mask in any::<u64>()) {
        let a = generate_fragment(&sig(), 1, 2).unwrap();
        let (fin, m) = structure(n, mask);
        let compiled = CompiledFamily::new(&a);
        let counts = compiled.counts(&m).unwrap();
        let sets = compiled.realization_sets(&m).unwrap();
        for (k, phi) in a.iter().enumerate() {
            prop_assert_eq!(counts[k], Count::Finite(naive_count(&fin, phi)), "{}", phi);
            prop_assert_eq!(&sets[k], &realizations(&m, phi).unwrap());
            prop_assert_eq!(counts[k], count(&m, phi).unwrap());
        }
    }

    #[test]
    fn biconditionals_and_counting(n in 1usize..=3, mask in any::<u64>(), k in 0u64..6) {
        let (fin, m) = structure(n, mask);
        let a = generate_fragment(&sig(), 1, 2).unwrap();
        let phis: Vec<&Formula> = a.iter().take(40).collect();
        for pair in phis.windows(2) {
            let iff = Formula::iff(pair[0].clone(), pair[1].clone());
            prop_assert_eq!(count(&m, &iff).unwrap(), Count::Finite(naive_count(&fin, &iff)));
            let vars = pair[0].free_vars();
            let at_least = Formula::exists_at_least(k, vars.as_slice(), pair[0].clone());
            prop_assert_eq!(count(&m, &at_least).unwrap(), Count::Finite(naive_count(&fin, &at_least)));
        }
    }

    #[test]
    fn remark_matches_counts_in_any_pair_order(n in 1usize..=2, masks in prop::collection::vec(any::<u64>(), 6)) {
        let a = generate_fragment(&sig(), 1, 2).unwrap();
        let enc = RemarkEncoding::new(&a, (n * n + 1) as u64).unwrap();
        let ms: Vec<Structure> = masks.iter().map(|&mask| structure(n, mask).1).collect();
        for x in &ms {
            for y in &ms {
                prop_assert_eq!(enc.check(x, y).unwrap(), e_equiv(x, y, &a).unwrap().verdict);
            }
        }
    }
}

#[test]
fn realization_sets_of_a_sentence_are_empty_tuples() {
    let (_, m) = structure(2, 0b1101);
    let a = generate_fragment(&sig(), 1, 2).unwrap();
    for (phi, set) in a.iter().zip(CompiledFamily::new(&a).realization_sets(&m).unwrap()) {
        if phi.free_vars().as_slice().is_empty() {
            let RealizationSet::Explicit { arity, tuples } = set else {
                panic!("finite structures give explicit sets");
            };
            assert_eq!(arity, 0);
            assert!(tuples.len() <= 1);
        }
    }
}
