// Copyright 2026 The PHN Forecast Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

/**
 * @file pipeline.hpp
 * Forecasting data preparation: CSV ingestion, synthetic plant-like data,
 * future-window targets, z-scoring, PCA, angle scaling and the chronological
 * train/test split.
 *
 * The chain applied by preprocess() is
 *   targets → split → z-score (train stats) → PCA (train) → min-max to [-π, π]
 * with every statistic fitted on the training rows only.
 */

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "phn/matrix.hpp"

namespace phn::data {

struct TimeSeriesFrame {
    /// As read from / written to CSV: ISO-8601 or integer indices.
    std::vector<std::string> timestamps;
    std::vector<std::string> channel_names;
    /// n_steps × n_channels.
    Matrix values;

    [[nodiscard]] std::size_t n_steps() const { return values.rows(); }
    [[nodiscard]] std::size_t n_channels() const { return values.cols(); }
};

/// Header row, first column timestamp, remaining columns numeric. Lines
/// beginning with '#' are comments. DataError names the file line and column
/// for any bad cell, ragged row, or non-increasing timestamp.
TimeSeriesFrame load_csv(const std::filesystem::path &path);
TimeSeriesFrame parse_csv(std::istream &in, const std::string &source_name = "<stream>");
/// Writes the frame in load_csv's format; values with 17 significant digits.
void write_csv(const TimeSeriesFrame &frame, std::ostream &out);

/// Seconds since 1970-01-01 for "YYYY-MM-DD[T ]HH:MM[:SS][Z]", or the value
/// itself for a plain integer. DataError otherwise.
std::int64_t parse_timestamp(const std::string &text);

struct SynthConfig {
    std::size_t n_steps = 6500;
    std::size_t n_base_channels = 64;
    std::uint64_t seed = 0;
};

/**
 * Plant-like multichannel series at a 1-minute cadence. Each base channel
 * mixes 2–4 of a small pool of shared plant cycles, AR(1) noise, and sparse
 * decaying spikes, in its own offset and units. Channels are laid out as
 * [base…, first differences…, 10-step trailing means…], so the default
 * produces 6500 × 192. SizeError if n_steps < 100.
 */
TimeSeriesFrame synth_generate(const SynthConfig &config);

struct TargetSet {
    /// Rows 0..n'-1 of the input channels.
    Matrix features;
    /// n' × 2; target_k(t) = mean of sensor k over [t+shift, t+shift+window-1].
    Matrix targets;
};

/// Rows without a complete future window are dropped:
/// n' = n_steps - (shift + window - 1). SizeError when nothing remains,
/// IndexError for a bad sensor channel.
TargetSet build_targets(const Matrix &channels, std::array<std::size_t, 2> sensors,
                        std::size_t shift_steps = 15, std::size_t window_steps = 10);

struct ScalerStats {
    std::vector<double> mean;
    /// Population standard deviation; 1 for constant columns.
    std::vector<double> std;
    std::vector<bool> constant;
};

ScalerStats standardize_fit(const Matrix &train);
/// Constant columns map to zero.
Matrix standardize_apply(const Matrix &m, const ScalerStats &stats);
/// Inverse of standardize_apply for non-constant columns.
Matrix destandardize(const Matrix &m, const ScalerStats &stats);

struct PcaModel {
    std::vector<double> mean;
    /// k × n_channels, orthonormal rows.
    Matrix components;
    /// Top-k covariance eigenvalues, nonincreasing.
    std::vector<double> eigenvalues;
    std::vector<double> explained_variance_ratio;
    int jacobi_sweeps = 0;
};

/// Eigendecomposition of the (population) channel covariance by cyclic
/// Jacobi. ConfigError if k exceeds the channel count.
PcaModel pca_fit(const Matrix &train, std::size_t k = 5);
/// (m - mean) · componentsᵀ.
Matrix pca_transform(const Matrix &m, const PcaModel &model);

struct AngleScaler {
    std::vector<double> min;
    std::vector<double> max;
};

AngleScaler angle_scale_fit(const Matrix &train);
/// Maps [min, max] linearly onto [-π, π]; values outside are clamped and
/// counted in `clamped`.
Matrix angle_scale_apply(const Matrix &m, const AngleScaler &scaler, std::size_t *clamped = nullptr);

struct SplitSizes {
    std::size_t n_train;
    std::size_t n_test;
};

/// First ⌊fraction·n⌋ rows train, the rest test. ConfigError if either side
/// would be empty or fraction is outside (0, 1).
SplitSizes chronological_split(std::size_t n, double train_fraction);

struct SupervisedSet {
    Matrix x; // n × k angles
    Matrix y; // n × 2 standardized targets

    [[nodiscard]] std::size_t size() const { return x.rows(); }
};

struct PreprocessConfig {
    std::array<std::size_t, 2> sensors{0, 1};
    std::size_t k = 5;
    std::size_t shift_steps = 15;
    std::size_t window_steps = 10;
    double train_fraction = 0.8;
};

struct PreprocessResult {
    ScalerStats feature_stats;
    PcaModel pca;
    AngleScaler angles;
    ScalerStats target_stats;
    SupervisedSet train;
    SupervisedSet test;
    std::size_t train_clamped = 0;
    std::size_t test_clamped = 0;
};

PreprocessResult preprocess(const TimeSeriesFrame &frame, const PreprocessConfig &config);

} // namespace phn::data
