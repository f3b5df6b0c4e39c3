#ifndef ROBUSTLSQ_DATA_IO_HPP_
#define ROBUSTLSQ_DATA_IO_HPP_

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "robustlsq/batch.hpp"
#include "robustlsq/datagen.hpp"

namespace robustlsq {

/// In-memory image of one dataset file: the generator parameters recorded in
/// the header, the batches, and the ground truth when the file carries one.
struct Dataset {
  SynthSpec spec;
  std::vector<MiniBatch> batches;
  std::optional<GroundTruth> truth;
};

/// Writes the dataset in the binary format below. All batches must match the
/// spec's p, n, and m; ground-truth blocks must match their batch shapes.
///
/// Layout (all integers and floats little-endian):
///   magic "RLSQDSET", version u32 (currently 1),
///   p i32, n i32, m i32, gamma f64, sigma f64, seed u64,
///   layout tag u32 (0 uniform, 1 k-heavy), k i32, heavy f64, light f64,
///   has_truth u8,
///   m batch blocks: id i64, X as p*n f64 column-major, y as n f64,
///     corruption vector u as n f64, uncorrupted bitmap ceil(n/8) bytes
///     (bit j%8 of byte j/8, set = uncorrupted, pad bits zero),
///   beta* as p f64 when has_truth,
///   crc32 u32 over every preceding byte.
///
/// Without ground truth the u blocks are all zeros and the bitmaps mark every
/// sample uncorrupted; the has_truth flag is what load_dataset trusts.
void save_dataset(const std::string& path, const SynthSpec& spec,
                  const std::vector<MiniBatch>& batches,
                  const std::optional<GroundTruth>& truth = std::nullopt);

/// Reads a file written by save_dataset. The round trip reproduces every
/// field bit for bit. Throws data_error naming the path for a bad magic,
/// an unsupported version, truncation, trailing bytes, or a checksum
/// mismatch.
Dataset load_dataset(const std::string& path);

/// Column selection for load_csv. The target must not repeat among the
/// features and feature names must be distinct.
struct CsvSchema {
  std::string target_column;
  std::vector<std::string> feature_columns;
  char delimiter = ',';
};

/// Feature matrix (one column per kept row, schema feature order), targets,
/// and the number of rows dropped for missing or unparseable values.
struct CsvData {
  Eigen::MatrixXd x;
  Eigen::VectorXd y;
  std::int64_t dropped_rows = 0;
};

/// Loads a delimited text file with a header row. Quoting follows RFC 4180:
/// fields may be double-quoted, doubled quotes escape a quote, and quoted
/// fields may span lines. A row whose field count differs from the header
/// is a structural error naming the line; a row whose selected fields are
/// empty or not finite numbers is dropped and counted. Throws data_error for
/// unreadable files, missing columns, structural errors, or when no usable
/// row remains.
CsvData load_csv(const std::string& path, const CsvSchema& schema);

/// Row order used by split_batches.
enum class SplitOrder { sequential, shuffled };

/// Chunks N samples into floor(N / batch_size) batches of exactly
/// batch_size, ids 0..m-1; the remainder tail is dropped. sequential keeps
/// row order (batch 0 holds rows 0..batch_size-1); shuffled permutes rows
/// once with the seeded generator, then chunks. batch_size must lie in
/// [1, N].
std::vector<MiniBatch> split_batches(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                     int batch_size,
                                     SplitOrder order = SplitOrder::sequential,
                                     std::uint64_t seed = 0);

}  // namespace robustlsq

#endif  // ROBUSTLSQ_DATA_IO_HPP_
