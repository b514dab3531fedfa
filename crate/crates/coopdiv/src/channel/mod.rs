//! Fading, receiver noise and the equivalent channels seen by the
//! destination.

mod equivalent;
mod fading;
mod stats;

pub use equivalent::{
    draf_equivalent_channel, draf_equivalent_channel_amplified, draf_mutual_information,
    draf_noise_profile, draf_whiten, draf_whiten_amplified, effective_noise_variance,
    lambda_statistic, ndsdaf_mutual_information, outage_indicator, relays_out_of_outage,
    two_product_gains, OutageModel, Whitened,
};
pub use fading::{cn01, sample_fading, sample_noise, FadingDistribution, FadingRealization, NoiseDraw};
pub use stats::{hypercube_check, lambda_cdf_check, noise_covariance, BoundCheck};
