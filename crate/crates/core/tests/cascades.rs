use biasline_core::bias::{BiasScorer, Normalization};
use biasline_core::cascade::{
    assemble_forecast_dataset, build_cascades, extract_features, feature_names, filter_min_levels, is_shift, score_bias,
    shift_label, stance, theta, Annotator, Cascade, EdgeRejection, Exclusion, FeatureContext, FeatureSet,
    ForecastConfig, ENGINEERED_FEATURES,
};
use biasline_core::corpus::{Forum, Post};
use biasline_core::embed::{train_embeddings, EmbeddingConfig, EmbeddingModel};
use biasline_core::ml::{evaluate, fit, ForestParams, ModelParams, ModelSpec};
use biasline_core::synth::{generate, SynthConfig};
use biasline_core::textproc::{preprocess, EntityExtractor, SentimentLexicon, Stopwords};
use biasline_core::tfidf::{build_vocab, compute_party_tfidf};
use biasline_core::{rng, Error};
use proptest::prelude::*;

fn post(id: &str, ts: i64, parent: Option<&str>) -> Post {
    let p = Post::new(id, Forum::Gab, format!("author-{id}"), ts, "policy vote today");
    match parent {
        Some(par) => p.with_parent(par),
        None => p,
    }
}

fn ids(c: &Cascade, indices: &[usize]) -> Vec<String> {
    indices.iter().map(|&i| c.nodes()[i].post.id.clone()).collect()
}

fn tiny_model() -> EmbeddingModel {
    let docs: Vec<Vec<String>> = (0..20)
        .map(|i| ["policy", "vote", "today", "good", "bad", "people"].iter().cycle().skip(i % 6).take(6).map(|s| s.to_string()).collect())
        .collect();
    let cfg = EmbeddingConfig {
        dim: 8,
        epochs: 1,
        min_count: 1,
        bucket_count: 256,
        ..EmbeddingConfig::default()
    };
    train_embeddings(&docs, &cfg).unwrap().0
}

/// root r; replies a, b, c; a has a1 and a2, b has b1.
fn seven_posts() -> Vec<Post> {
    vec![
        post("b1", 40, Some("b")),
        post("c", 30, Some("r")),
        post("a2", 52, Some("a")),
        post("r", 0, None),
        post("a", 10, Some("r")),
        post("a1", 50, Some("a")),
        post("b", 20, Some("r")),
    ]
}

#[test]
fn single_post_cascade() {
    let built = build_cascades(&[post("r", 0, None)]).unwrap();
    assert_eq!(built.cascades.len(), 1);
    assert_eq!(built.cascades[0].len(), 1);
    assert_eq!(built.cascades[0].levels(), 1);
}

#[test]
fn seven_node_fixture_shape() {
    let built = build_cascades(&seven_posts()).unwrap();
    assert_eq!(built.cascades.len(), 1);
    let c = &built.cascades[0];
    assert!(!c.orphan);
    assert_eq!(c.root_id(), "r");
    assert_eq!(c.levels(), 3);
    assert_eq!(c.level_sizes(), vec![1, 3, 3]);
    let order: Vec<&str> = c.nodes().iter().map(|n| n.post.id.as_str()).collect();
    assert_eq!(order, ["r", "a", "b", "c", "a1", "a2", "b1"]);
    assert_eq!(ids(c, &c.get("r").unwrap().children), ["a", "b", "c"]);
    assert_eq!(ids(c, &c.get("a").unwrap().children), ["a1", "a2"]);
    assert_eq!(ids(c, &c.get("b").unwrap().children), ["b1"]);
    assert!(c.get("c").unwrap().children.is_empty());
    let mut edges: Vec<(String, String)> = c.edges().map(|(a, b, _)| (a.to_string(), b.to_string())).collect();
    edges.sort();
    let expected = [("a", "r"), ("a1", "a"), ("a2", "a"), ("b", "r"), ("b1", "b"), ("c", "r")];
    assert_eq!(edges, expected.map(|(a, b)| (a.to_string(), b.to_string())));
    for n in c.nodes() {
        if let Some(p) = n.parent {
            assert_eq!(n.level, c.nodes()[p].level + 1);
            assert!(n.post.timestamp > c.nodes()[p].post.timestamp);
        }
    }
}

#[test]
fn input_order_does_not_matter() {
    let mut posts = seven_posts();
    let a = build_cascades(&posts).unwrap();
    let mut r = rng::seeded(3);
    for _ in 0..5 {
        rng::shuffle(&mut posts, &mut r);
        assert_eq!(build_cascades(&posts).unwrap(), a);
    }
}

#[test]
fn non_increasing_timestamp_rejects_edge() {
    for child_ts in [5, 4] {
        let built = build_cascades(&[post("r", 5, None), post("x", child_ts, Some("r")), post("y", 9, Some("x"))]).unwrap();
        assert_eq!(built.rejected_edges.len(), 1);
        assert_eq!(built.rejected_edges[0].child, "x");
        assert_eq!(built.rejected_edges[0].reason, EdgeRejection::NonIncreasingTimestamp);
        assert_eq!(built.cascades.len(), 2);
        let orphan = built.cascades.iter().find(|c| c.root_id() == "x").unwrap();
        assert!(orphan.orphan);
        assert_eq!(orphan.len(), 2);
    }
}

#[test]
fn missing_parent_becomes_orphan_root() {
    let built = build_cascades(&[post("r", 0, None), post("x", 3, Some("gone"))]).unwrap();
    assert_eq!(built.missing_parents, 1);
    let x = built.cascades.iter().find(|c| c.root_id() == "x").unwrap();
    assert!(x.orphan);
    assert!(!built.cascades.iter().find(|c| c.root_id() == "r").unwrap().orphan);
}

#[test]
fn every_cascade_is_a_tree() {
    let corpus = generate(&SynthConfig {
        cascades: 40,
        ..SynthConfig::default()
    })
    .unwrap();
    let built = build_cascades(&corpus.posts).unwrap();
    assert_eq!(built.cascades.len(), 40);
    assert_eq!(built.cascades.iter().map(Cascade::len).sum::<usize>(), corpus.posts.len());
    for c in &built.cascades {
        assert_eq!(c.edges().count(), c.len() - 1);
    }
}

#[test]
fn cycles_are_named() {
    let posts = [post("r", 0, None), post("x", 1, Some("y")), post("y", 2, Some("z")), post("z", 3, Some("x")), post("t", 4, Some("x"))];
    match build_cascades(&posts) {
        Err(Error::Cycle(mut members)) => {
            members.sort();
            assert_eq!(members, ["x", "y", "z"]);
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn duplicate_ids_rejected() {
    assert!(matches!(build_cascades(&[post("r", 0, None), post("r", 1, None)]), Err(Error::InvalidRecord(_))));
}

/// A chain cascade with `levels` levels.
fn chain(name: &str, levels: usize) -> Vec<Post> {
    (0..levels)
        .map(|l| {
            let parent = (l > 0).then(|| format!("{name}-{}", l - 1));
            post(&format!("{name}-{l}"), l as i64, parent.as_deref())
        })
        .collect()
}

#[test]
fn min_level_boundary() {
    let four = build_cascades(&chain("a", 4)).unwrap().cascades;
    let five = build_cascades(&chain("b", 5)).unwrap().cascades;
    assert!(filter_min_levels(four, 5).is_empty());
    assert_eq!(filter_min_levels(five, 5).len(), 1);
}

#[test]
fn min_level_mixed_fixture() {
    let depths = [1, 2, 3, 4, 5, 5, 6, 7, 4, 9];
    let posts: Vec<Post> = depths.iter().enumerate().flat_map(|(i, &d)| chain(&format!("k{i}"), d)).collect();
    let cascades = build_cascades(&posts).unwrap().cascades;
    assert_eq!(cascades.len(), 10);
    // hand count of depths >= 5: 5, 5, 6, 7, 9
    assert_eq!(filter_min_levels(cascades.clone(), 5).len(), 5);
    assert_eq!(filter_min_levels(cascades, 1).len(), 10);
}

#[test]
fn stance_rules() {
    let v = [0.3, -0.2, 0.9];
    assert!((stance(&v, &v, 0.5, 0.2) - 1.0).abs() < 1e-12);
    // cos between (1, 0) and (1, 1) is 1/sqrt(2)
    let h = std::f64::consts::FRAC_1_SQRT_2;
    assert!((stance(&[1.0, 0.0], &[1.0, 1.0], 0.0, -0.7) - h).abs() < 1e-12);
    assert!((stance(&[1.0, 0.0], &[1.0, 1.0], 0.4, -0.7) + h).abs() < 1e-12);
    assert!((stance(&[1.0, 0.0], &[1.0, 1.0], -0.4, -0.7) - h).abs() < 1e-12);
}

#[test]
fn annotate_identical_reply() {
    let model = tiny_model();
    let stop = Stopwords::english();
    let lex = SentimentLexicon::builtin();
    let mut r = post("r", 0, None);
    r.text = "good policy vote".into();
    let mut c = post("c", 1, Some("r"));
    c.text = "good policy vote".into();
    let mut cascade = build_cascades(&[r, c]).unwrap().cascades.remove(0);
    Annotator {
        stopwords: &stop,
        lexicon: &lex,
        model: &model,
    }
    .annotate(&mut cascade);
    assert!(cascade.root().sentiment > 0.0);
    assert!((cascade.nodes()[1].stance - 1.0).abs() < 1e-9);
    assert_eq!(cascade.root().stance, 0.0);
}

fn with_gammas(levels: &[&[Option<f64>]]) -> Cascade {
    // node i of level l is a child of node 0 of level l - 1
    let mut posts = Vec::new();
    let mut ts = 0;
    for (l, nodes) in levels.iter().enumerate() {
        for k in 0..nodes.len() {
            ts += 1;
            let parent = (l > 0).then(|| format!("n{}-0", l - 1));
            posts.push(post(&format!("n{l}-{k}"), ts, parent.as_deref()));
        }
    }
    let mut c = build_cascades(&posts).unwrap().cascades.remove(0);
    for (l, nodes) in levels.iter().enumerate() {
        for (k, g) in nodes.iter().enumerate() {
            let i = c.nodes().iter().position(|n| n.post.id == format!("n{l}-{k}")).unwrap();
            c.node_mut(i).gamma = *g;
        }
    }
    c
}

#[test]
fn theta_examples() {
    let all = with_gammas(&[&[Some(0.4)], &[Some(0.4), Some(0.4)]]);
    assert!((theta(&all, 2).theta - 0.4).abs() < 1e-15);
    let mixed = with_gammas(&[&[Some(0.2)], &[Some(-0.4), None]]);
    let t = theta(&mixed, 2);
    assert!((t.theta + 0.1).abs() < 1e-15);
    assert_eq!(t.n_scored, 2);
    let none = with_gammas(&[&[None], &[None]]);
    let t = theta(&none, 2);
    assert_eq!(t.theta, 0.0);
    assert!(!t.has_scored());
}

#[test]
fn theta_ignores_order_within_level() {
    let a = with_gammas(&[&[Some(0.1)], &[Some(0.5), Some(-0.3), Some(0.9)]]);
    let b = with_gammas(&[&[Some(0.1)], &[Some(0.9), Some(0.5), Some(-0.3)]]);
    assert_eq!(theta(&a, 2), theta(&b, 2));
}

#[test]
fn shift_label_cases() {
    // theta over level 0 is +0.2; adding level 1 gives (0.2 - 0.4) / 2 = -0.1
    let flip = with_gammas(&[&[Some(0.2)], &[Some(-0.4)]]);
    assert_eq!(shift_label(&flip, 1, 0.0), Ok(1));
    let flat = with_gammas(&[&[Some(0.2)], &[Some(0.2)]]);
    assert_eq!(shift_label(&flat, 1, 0.0), Ok(0));
    // 0.2 -> 0.25 with epsilon 0.1
    let drift = with_gammas(&[&[Some(0.2)], &[Some(0.3)]]);
    assert_eq!(shift_label(&drift, 1, 0.1), Ok(0));
    assert_eq!(shift_label(&drift, 1, 0.01), Ok(1));
    assert_eq!(shift_label(&drift, 1, 0.0), Ok(0));
    assert_eq!(shift_label(&flat, 2, 0.0), Err(Exclusion::NoLabelLevel));
}

proptest! {
    #[test]
    fn shift_epsilon_limits(a in -1.0f64..1.0, b in -1.0f64..1.0, zero_a: bool) {
        let a = if zero_a { 0.0 } else { a };
        let sign_change = a.signum() != b.signum() || (a == 0.0) != (b == 0.0);
        prop_assert_eq!(is_shift(a, b, 0.0), sign_change);
        prop_assert_eq!(is_shift(a, b, f64::INFINITY), sign_change);
    }
}

fn star(followers: Option<u64>, replies: usize) -> Cascade {
    let mut root = post("r", 0, None);
    root.author_follower_count = followers;
    let mut posts = vec![root];
    for k in 0..replies {
        posts.push(post(&format!("c{k}"), 1 + k as i64, Some("r")));
    }
    build_cascades(&posts).unwrap().cascades.remove(0)
}

#[test]
fn root_influence_ratio() {
    let model = tiny_model();
    let stop = Stopwords::english();
    let ctx = FeatureContext {
        stopwords: &stop,
        model: &model,
    };
    assert_eq!(extract_features(&star(Some(20), 4), 2, &ctx).user[0], 0.2);
    assert_eq!(extract_features(&star(Some(0), 4), 2, &ctx).user[0], 0.0);
    assert_eq!(extract_features(&star(None, 4), 2, &ctx).user[0], 0.0);
    // replies outside the prefix are not neighbours yet
    assert_eq!(extract_features(&star(Some(20), 4), 1, &ctx).user[0], 0.0);
}

#[test]
fn positive_influence_mean() {
    let model = tiny_model();
    let stop = Stopwords::english();
    let ctx = FeatureContext {
        stopwords: &stop,
        model: &model,
    };
    let mut c = star(Some(10), 2);
    for (i, z) in [0.5, 0.3, -0.2].into_iter().enumerate() {
        c.node_mut(i).sentiment = z;
    }
    let f = extract_features(&c, 2, &ctx);
    assert_eq!(f.polarity[0], 0.4);
    assert_eq!(f.polarity[1], -0.2);
}

#[test]
fn seven_node_structure_features() {
    let model = tiny_model();
    let stop = Stopwords::english();
    let ctx = FeatureContext {
        stopwords: &stop,
        model: &model,
    };
    let c = build_cascades(&seven_posts()).unwrap().cascades.remove(0);
    let f = extract_features(&c, 3, &ctx);
    assert_eq!(f.cascade[0], 7.0);
    assert_eq!(f.cascade[1], 3.0);
    assert_eq!(f.cascade[2], 3.0);
    // internal nodes r (3), a (2), b (1)
    assert_eq!(f.cascade[3], 2.0);
    assert_eq!(f.cascade[4], 4.0 / 7.0);
    // a has the largest subtree among non-root nodes, at level 1
    assert_eq!(f.cascade[10], 1.0);
    // root response: first reply at t = 10
    assert_eq!(f.temporal[1], 10.0);
    assert_eq!(f.temporal[3], 52.0);
    // first arrivals per level: 0, 10, 40
    assert_eq!(f.temporal[4], 20.0);
}

struct Prepared {
    cascades: Vec<Cascade>,
    model: EmbeddingModel,
    stopwords: Stopwords,
}

fn prepare(cfg: &SynthConfig) -> Prepared {
    let corpus = generate(cfg).unwrap();
    let stopwords = Stopwords::english();
    let extractor = EntityExtractor::new(stopwords.clone());
    let vocab = build_vocab(&corpus.posts, &extractor, 5).unwrap();
    let weights = compute_party_tfidf(&corpus.speeches, &vocab, &stopwords).unwrap();
    let scorer = BiasScorer {
        extractor,
        weights,
        normalization: Normalization::Mean,
    };
    let docs: Vec<Vec<String>> = corpus.posts.iter().map(|p| preprocess(&p.text, &stopwords)).collect();
    let model = train_embeddings(
        &docs,
        &EmbeddingConfig {
            dim: 8,
            epochs: 1,
            bucket_count: 1024,
            ..EmbeddingConfig::default()
        },
    )
    .unwrap()
    .0;
    let lexicon = SentimentLexicon::builtin();
    let mut cascades = filter_min_levels(build_cascades(&corpus.posts).unwrap().cascades, cfg.min_levels);
    let annotator = Annotator {
        stopwords: &stopwords,
        lexicon: &lexicon,
        model: &model,
    };
    for c in &mut cascades {
        annotator.annotate(c);
        score_bias(c, &scorer);
    }
    Prepared {
        cascades,
        model,
        stopwords,
    }
}

#[test]
fn features_never_read_beyond_prefix() {
    let p = prepare(&SynthConfig {
        cascades: 25,
        ..SynthConfig::default()
    });
    let ctx = FeatureContext {
        stopwords: &p.stopwords,
        model: &p.model,
    };
    for d in 1..5 {
        for c in &p.cascades {
            let clean = extract_features(c, d, &ctx).to_vec();
            let mut poisoned = c.clone();
            for i in 0..poisoned.len() {
                if poisoned.nodes()[i].level >= d {
                    let n = poisoned.node_mut(i);
                    n.sentiment = f64::NAN;
                    n.stance = f64::NAN;
                    n.gamma = Some(f64::NAN);
                    n.post.text = "catastrophic excellent #poison".into();
                    n.post.author = "poison".into();
                    n.post.timestamp = i64::MAX / 4;
                    n.post.author_follower_count = Some(u64::MAX / 4);
                    n.post.reshare_count = Some(u64::MAX / 4);
                }
            }
            let after = extract_features(&poisoned, d, &ctx).to_vec();
            assert_eq!(clean.len(), after.len());
            assert!(clean.iter().zip(&after).all(|(a, b)| a.to_bits() == b.to_bits()), "d = {d}");
        }
    }
}

#[test]
fn feature_cardinality() {
    let p = prepare(&SynthConfig {
        cascades: 10,
        ..SynthConfig::default()
    });
    let ctx = FeatureContext {
        stopwords: &p.stopwords,
        model: &p.model,
    };
    assert_eq!(ENGINEERED_FEATURES, 30);
    assert_eq!(feature_names(8).len(), 38);
    for c in &p.cascades {
        for d in 1..=c.levels() {
            let v = extract_features(c, d, &ctx).to_vec();
            assert_eq!(v.len(), 30 + 8);
            assert!(v.iter().all(|x| x.is_finite()));
        }
    }
    let single = star(Some(3), 0);
    assert_eq!(extract_features(&single, 1, &ctx).to_vec().len(), 38);
    assert_eq!(FeatureSet::Engineered.columns(8).len(), 30);
    assert_eq!(FeatureSet::Text.columns(8).len(), 8);
}

#[test]
fn assemble_rows_and_exclusions() {
    let p = prepare(&SynthConfig {
        cascades: 3,
        ..SynthConfig::default()
    });
    let ctx = FeatureContext {
        stopwords: &p.stopwords,
        model: &p.model,
    };
    let cfg = ForecastConfig::default();
    let out = assemble_forecast_dataset(&p.cascades, &cfg, &ctx).unwrap();
    assert_eq!(out.dataset.len(), 3);
    assert!(out.excluded.is_empty());

    let short = build_cascades(&chain("s", 3)).unwrap().cascades;
    let mut mixed = p.cascades.clone();
    mixed.extend(short.clone());
    let out = assemble_forecast_dataset(&mixed, &cfg, &ctx).unwrap();
    assert_eq!(out.dataset.len(), 3);
    assert_eq!(out.excluded, vec![("s-0".to_string(), Exclusion::TooFewLevels { levels: 3 })]);
    assert!(matches!(
        assemble_forecast_dataset(&short, &cfg, &ctx),
        Err(Error::NoEligibleCascades { excluded: 1 })
    ));
}

#[test]
fn forecast_config_validation() {
    let bad = ForecastConfig {
        train_levels: 5,
        ..ForecastConfig::default()
    };
    assert!(bad.validate().is_err());
    assert!(ForecastConfig::default().validate().is_ok());
}

#[test]
fn planted_labels_match_generator() {
    let cfg = SynthConfig {
        cascades: 200,
        ..SynthConfig::default()
    };
    let corpus = generate(&cfg).unwrap();
    let p = prepare(&cfg);
    let ctx = FeatureContext {
        stopwords: &p.stopwords,
        model: &p.model,
    };
    let out = assemble_forecast_dataset(&p.cascades, &ForecastConfig::default(), &ctx).unwrap();
    assert_eq!(out.dataset.len(), 200);
    for (row, root) in out.roots.iter().enumerate() {
        let planted = corpus.planted.iter().find(|c| &c.root_id == root).unwrap();
        assert_eq!(out.dataset.y[row], u8::from(planted.shift));
        assert_eq!(out.dataset.x.get(row, 0), planted.root_influence);
    }
}

#[test]
fn forest_learns_planted_rule() {
    let p = prepare(&SynthConfig {
        cascades: 600,
        seed: 3,
        ..SynthConfig::default()
    });
    let ctx = FeatureContext {
        stopwords: &p.stopwords,
        model: &p.model,
    };
    let data = assemble_forecast_dataset(&p.cascades, &ForecastConfig::default(), &ctx).unwrap().dataset;
    let split = 480;
    let train = data.select_rows(&(0..split).collect::<Vec<_>>());
    let test = data.select_rows(&(split..data.len()).collect::<Vec<_>>());
    let spec = ModelSpec::new(ModelParams::RandomForest(ForestParams::default()), 1);
    let model = fit(&spec, &train).unwrap();
    let acc = evaluate(&test.y, &model.predict_proba(&test.x, &test.feature_names).unwrap()).unwrap().accuracy;
    assert!(acc >= 0.85, "{acc}");
}
