use biasline::model_io::{decode_model, encode_model, load_model, save_model};
use biasline_core::embed::{train_embeddings, EmbeddingConfig};
use biasline_core::textproc::{preprocess, Stopwords};

fn small_model() -> biasline_core::embed::EmbeddingModel {
    let sw = Stopwords::english();
    let docs: Vec<_> = [
        "the senate passed the budget bill today",
        "voters rallied for the budget in the city",
        "the city council debated the border bill",
        "senators debated border security and the budget",
    ]
    .iter()
    .map(|t| preprocess(t, &sw))
    .collect();
    let cfg = EmbeddingConfig {
        dim: 8,
        epochs: 2,
        min_count: 1,
        bucket_count: 64,
        seed: 3,
        ..EmbeddingConfig::default()
    };
    train_embeddings(&docs, &cfg).unwrap().0
}

#[test]
fn round_trip_is_bit_exact() {
    let m = small_model();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("nested/model.blem");
    save_model(&m, &path).unwrap();
    let back = load_model(&path).unwrap();
    assert_eq!(back, m);
    assert_eq!(encode_model(&back), encode_model(&m));
    let bits = |v: &[f32]| v.iter().map(|x| x.to_bits()).collect::<Vec<_>>();
    assert_eq!(bits(back.input_matrix()), bits(m.input_matrix()));
    assert_eq!(back.word_vector("budget"), m.word_vector("budget"));
    assert_eq!(back.word_vector("budgetary"), m.word_vector("budgetary"));
}

#[test]
fn corrupt_files_are_rejected() {
    let bytes = encode_model(&small_model());
    assert!(decode_model(&bytes[..bytes.len() - 1]).is_err());
    let mut extra = bytes.clone();
    extra.push(0);
    assert!(decode_model(&extra).is_err());
    let mut magic = bytes.clone();
    magic[0] = b'X';
    assert!(decode_model(&magic).is_err());
    assert!(decode_model(&[]).is_err());
}
