//! Fourier multipliers `(Tf)^(n) = λ_n f̂(n)` and the summability
//! diagnostics built on ring sweeps of their symbols.

mod diagnostics;
mod factorization;
mod krok2;
mod rings;
mod symbol;

pub use diagnostics::{
    classify_trend, increment_ratio, krok1_flatness_certify, lema2_decay_report, main_sum_certify,
    main_sum_partial, q_main_exact, ring_stats_range, schatten_partial, schatten_partials,
    schatten_svd_check, sharpness_explore, sharpness_summary, sorted_abs_symbol,
    truncated_singular_values, DiagnosticsConfig, MainSumReport, SharpnessRow, Trend,
    CONVERGENT_RATIO, DECAY_FLAG, DIVERGENT_RATIO, FLATNESS_FACTOR, TREND_WINDOW,
};
pub use factorization::{catalog_witnesses, compose_factorization, FactorizationWitness};
pub use krok2::{
    krok2_counting, krok2_counting_certify, lema1_check, pre_krok2_certify, rearrange_nonincreasing,
    sequence_lhs, CountingOutcome,
};
pub use rings::{dual_exponent, ring_moments, ring_stats, sweep_cost, RingMoments, RingStats, MAX_SWEEP_POINTS};
pub use symbol::{apply, Boundedness, MultiplierSymbol, SymbolKind};
