//! Trains the operational autoencoder on a synthetic planted-band cube and
//! prints the loss curve and the band ranking.
//!
//! `cargo run --release --example train_and_rank -- [epochs] [seed]`

use srl_soa::hsi::{flatten_pixels, normalize};
use srl_soa::synthetic::{planted_mixture, PlantedSpec};
use srl_soa::trainer::{epoch_mean_loss, rank_bands, select_top_k, train, TrainConfig};

fn main() {
    let mut args = std::env::args().skip(1);
    let epochs = args.next().and_then(|a| a.parse().ok()).unwrap_or(20);
    let seed = args.next().and_then(|a| a.parse().ok()).unwrap_or(0);

    let planted = planted_mixture(&PlantedSpec {
        height: 16,
        width: 16,
        bands: 30,
        seed,
        ..PlantedSpec::default()
    })
    .unwrap();
    let x = flatten_pixels(&normalize(&planted.cube));
    let config = TrainConfig {
        epochs,
        seed,
        ..TrainConfig::default()
    };
    let outcome = train(&x, &config).unwrap();
    for (epoch, loss) in epoch_mean_loss(&outcome.history).iter().enumerate() {
        if epoch % 5 == 0 || epoch + 1 == epochs {
            println!("epoch {epoch:3}  mean batch loss {loss:.5}");
        }
    }

    let ranking = rank_bands(&outcome.params, &x, 128).unwrap();
    println!("planted source bands: {:?}", planted.planted);
    println!("top 10 bands: {:?}", &ranking.order[..10]);
    println!("selected k=5 (ascending): {:?}", select_top_k(&ranking, 5).unwrap().indices());
    for &b in &ranking.order[..5] {
        println!("  band {b:2}  alpha {:.4}", ranking.alpha[b]);
    }
}
