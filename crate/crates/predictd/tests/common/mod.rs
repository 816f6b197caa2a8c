#![allow(dead_code)]

use std::sync::Arc;

use predict_core::combine::Models;
use predict_core::corpus::{default_stopwords, tokenize, TokenPolicy};
use predict_core::ngram::{train, TrainOptions};
use predict_core::semantic::{train_space, LsaOptions};

pub const TOY_TEXT: &str = "The cat sat on the mat. The cat ate the fish. A dog sat on the rug. \
The dog chased the cat. The fish swam in the bowl. A cat likes fish and the dog likes bones. \
The mat was red and the rug was blue. The bowl was on the table near the mat. \
Cats and dogs play in the garden. The garden has a table and a chair.";

pub fn toy_models() -> Arc<Models> {
    let tokens = tokenize(TOY_TEXT, &TokenPolicy::default());
    let lm = train(
        &tokens,
        &TrainOptions {
            order: 3,
            ..TrainOptions::default()
        },
    )
    .unwrap();
    let opts = LsaOptions {
        dims: 4,
        window: 3,
        columns: 12,
        density_m: 5,
        ..LsaOptions::default()
    };
    let space = train_space(&tokens, &default_stopwords("en").unwrap(), &opts).unwrap();
    Arc::new(Models::new(lm, Some(space)))
}
