//! HGNN autoencoder, ListMLE ranking head, Adam and training loops.

pub mod adam;
pub mod gradcheck;
pub mod listmle;
pub mod matrix;
pub mod model;
pub mod propagator;
pub mod train;

pub use adam::{Adam, AdamConfig};
pub use gradcheck::grad_check;
pub use listmle::{listmle, listmle_grad, listmle_loss, target_order};
pub use matrix::Matrix;
pub use model::{ae_loss_and_grad, decode, encode, minmax, rank_forward, rank_loss_and_grad, reconstruction_loss, AeShape, RankerShape};
pub use propagator::{hgnn_layer, Propagator};
pub use train::{finetune, pretrain_ranker, train_autoencoder, AeOutcome, EpochRecord, ModelFile, PretrainOutcome, RankSample, Ranker, TrainConfig};
