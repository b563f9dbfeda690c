//! Inference kernels for the layer kinds a CAM-compatible CNN is built from.
//!
//! All kernels are pure: they borrow their inputs and return fresh tensors.

mod activation;
mod conv;
mod dense;
mod norm;
mod pool;
mod resize;
mod softmax;

pub use activation::{activation, relu, relu6};
pub use conv::{conv2d, depthwise_conv2d, output_geometry, ConvParams, Padding};
pub use dense::dense;
pub use norm::{batch_norm, BatchNormParams};
pub use pool::global_average_pool;
pub use resize::resize_bilinear;
pub use softmax::softmax;
