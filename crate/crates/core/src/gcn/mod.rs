//! Dense two-layer GCN with hand-derived gradients.

mod checkpoint;
mod grad;
mod loss;
mod model;
mod normalize;
mod train;

pub use checkpoint::{decode_checkpoint, encode_checkpoint, read_checkpoint, write_checkpoint, CHECKPOINT_MAGIC, CHECKPOINT_VERSION};
pub use grad::{gradients, param_gradients, Gradients, NodeObjective};
pub use loss::{node_loss, node_loss_grad, LossKind};
pub use model::{argmax, forward, neighbor_lists, predict_all, GcnParams, Predictor};
pub use normalize::{normalize_adjacency, Propagation};
pub use train::{train, train_nodes, train_with_history, TrainConfig};
