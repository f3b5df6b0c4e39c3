#include "robustlsq/data_io.hpp"

#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>
#include <utility>

#include "robustlsq/errors.hpp"
#include "robustlsq/rng.hpp"

namespace robustlsq {

namespace {

constexpr char kMagic[8] = {'R', 'L', 'S', 'Q', 'D', 'S', 'E', 'T'};
constexpr std::uint32_t kVersion = 1;

std::uint32_t crc32(const std::string& bytes, std::size_t count) {
  static const std::array<std::uint32_t, 256> table = [] {
    std::array<std::uint32_t, 256> t{};
    for (std::uint32_t i = 0; i < 256; ++i) {
      std::uint32_t c = i;
      for (int k = 0; k < 8; ++k) c = (c & 1) ? 0xEDB88320u ^ (c >> 1) : c >> 1;
      t[i] = c;
    }
    return t;
  }();
  std::uint32_t crc = 0xFFFFFFFFu;
  for (std::size_t i = 0; i < count; ++i) {
    crc = table[(crc ^ static_cast<unsigned char>(bytes[i])) & 0xFFu] ^ (crc >> 8);
  }
  return crc ^ 0xFFFFFFFFu;
}

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFFu));
}

void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFFu));
}

void put_i32(std::string& out, std::int32_t v) { put_u32(out, static_cast<std::uint32_t>(v)); }
void put_i64(std::string& out, std::int64_t v) { put_u64(out, static_cast<std::uint64_t>(v)); }
void put_f64(std::string& out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }

/// Bounds-checked sequential reader over a loaded file image.
class Cursor {
 public:
  Cursor(const std::string& bytes, std::size_t end, const std::string& path)
      : bytes_(bytes), end_(end), path_(path) {}

  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) {
      v |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
    }
    pos_ += 4;
    return v;
  }

  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) {
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
    }
    pos_ += 8;
    return v;
  }

  std::int32_t i32() { return static_cast<std::int32_t>(u32()); }
  std::int64_t i64() { return static_cast<std::int64_t>(u64()); }
  double f64() { return std::bit_cast<double>(u64()); }

  unsigned char byte() {
    need(1);
    return static_cast<unsigned char>(bytes_[pos_++]);
  }

  std::size_t remaining() const { return end_ - pos_; }

 private:
  void need(std::size_t count) {
    if (end_ - pos_ < count) {
      throw data_error("truncated dataset file: " + path_);
    }
  }

  const std::string& bytes_;
  std::size_t pos_ = 0;
  std::size_t end_;
  const std::string& path_;
};

struct LayoutFields {
  std::uint32_t tag = 0;
  std::int32_t k = 0;
  double heavy = 0.0;
  double light = 0.0;
};

LayoutFields encode_layout(const CorruptionLayout& layout) {
  LayoutFields f;
  if (const auto* kh = std::get_if<KHeavyLayout>(&layout)) {
    f.tag = 1;
    f.k = kh->k;
    f.heavy = kh->heavy_ratio;
    f.light = kh->light_ratio;
  }
  return f;
}

CorruptionLayout decode_layout(const LayoutFields& f, const std::string& path) {
  if (f.tag == 0) return UniformRatiosLayout{};
  if (f.tag == 1) {
    KHeavyLayout kh;
    kh.k = f.k;
    kh.heavy_ratio = f.heavy;
    kh.light_ratio = f.light;
    return kh;
  }
  throw data_error("unknown corruption layout tag " + std::to_string(f.tag) + " in " + path);
}

}  // namespace

void save_dataset(const std::string& path, const SynthSpec& spec,
                  const std::vector<MiniBatch>& batches,
                  const std::optional<GroundTruth>& truth) {
  if (batches.size() == 0) {
    throw std::invalid_argument("cannot save a dataset with no batches");
  }
  if (static_cast<int>(batches.size()) != spec.m) {
    throw std::invalid_argument("spec.m = " + std::to_string(spec.m) + " but " +
                                std::to_string(batches.size()) + " batches were given");
  }
  for (const MiniBatch& b : batches) {
    if (b.p() != spec.p || b.n() != spec.n) {
      throw std::invalid_argument("batch " + std::to_string(b.id()) +
                                  " does not match the spec dimensions");
    }
  }
  if (truth) {
    if (truth->beta_star.dim() != spec.p ||
        truth->uncorrupted_sets.size() != batches.size() ||
        truth->corruption_vectors.size() != batches.size()) {
      throw std::invalid_argument("ground truth does not match the batch shapes");
    }
    for (std::size_t i = 0; i < batches.size(); ++i) {
      if (truth->uncorrupted_sets[i].universe() != spec.n ||
          truth->corruption_vectors[i].size() != spec.n) {
        throw std::invalid_argument("ground truth for batch " +
                                    std::to_string(batches[i].id()) +
                                    " does not match the batch shapes");
      }
    }
  }

  std::string out;
  const std::size_t bitmap_bytes = static_cast<std::size_t>((spec.n + 7) / 8);
  out.reserve(64 + batches.size() * (static_cast<std::size_t>(spec.p) + 2) *
                       static_cast<std::size_t>(spec.n) * 8);
  out.append(kMagic, sizeof(kMagic));
  put_u32(out, kVersion);
  put_i32(out, spec.p);
  put_i32(out, spec.n);
  put_i32(out, spec.m);
  put_f64(out, spec.gamma);
  put_f64(out, spec.sigma);
  put_u64(out, spec.seed);
  const LayoutFields layout = encode_layout(spec.layout);
  put_u32(out, layout.tag);
  put_i32(out, layout.k);
  put_f64(out, layout.heavy);
  put_f64(out, layout.light);
  out.push_back(truth ? '\x01' : '\x00');

  for (std::size_t b = 0; b < batches.size(); ++b) {
    const MiniBatch& batch = batches[b];
    put_i64(out, batch.id());
    for (Eigen::Index j = 0; j < batch.n(); ++j) {
      for (Eigen::Index i = 0; i < batch.p(); ++i) put_f64(out, batch.x()(i, j));
    }
    for (Eigen::Index j = 0; j < batch.n(); ++j) put_f64(out, batch.y()[j]);
    if (truth) {
      const Eigen::VectorXd& u = truth->corruption_vectors[b];
      for (Eigen::Index j = 0; j < batch.n(); ++j) put_f64(out, u[j]);
      std::string bitmap(bitmap_bytes, '\x00');
      for (int j : truth->uncorrupted_sets[b].indices()) {
        bitmap[static_cast<std::size_t>(j / 8)] |= static_cast<char>(1 << (j % 8));
      }
      out += bitmap;
    } else {
      for (Eigen::Index j = 0; j < batch.n(); ++j) put_f64(out, 0.0);
      std::string bitmap(bitmap_bytes, '\x00');
      for (int j = 0; j < spec.n; ++j) {
        bitmap[static_cast<std::size_t>(j / 8)] |= static_cast<char>(1 << (j % 8));
      }
      out += bitmap;
    }
  }
  if (truth) {
    for (Eigen::Index i = 0; i < spec.p; ++i) put_f64(out, truth->beta_star.vec()[i]);
  }
  put_u32(out, crc32(out, out.size()));

  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) {
    throw data_error("cannot open " + path + " for writing");
  }
  file.write(out.data(), static_cast<std::streamsize>(out.size()));
  file.flush();
  if (!file) {
    throw data_error("write failed: " + path);
  }
}

Dataset load_dataset(const std::string& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) {
    throw data_error("cannot open " + path + " for reading");
  }
  std::string bytes((std::istreambuf_iterator<char>(file)), std::istreambuf_iterator<char>());
  if (file.bad()) {
    throw data_error("read failed: " + path);
  }

  if (bytes.size() < sizeof(kMagic) || std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0) {
    throw data_error("not a dataset file (bad magic): " + path);
  }
  if (bytes.size() < sizeof(kMagic) + 4 + 4) {
    throw data_error("truncated dataset file: " + path);
  }
  {
    Cursor version_cursor(bytes, bytes.size(), path);
    for (int i = 0; i < 8; ++i) version_cursor.byte();
    const std::uint32_t version = version_cursor.u32();
    if (version != kVersion) {
      throw data_error("unsupported dataset format version " + std::to_string(version) +
                       " in " + path + " (this build reads version " +
                       std::to_string(kVersion) + ")");
    }
  }
  const std::size_t payload = bytes.size() - 4;
  {
    std::string stored_raw = bytes.substr(payload, 4);
    std::uint32_t stored = 0;
    for (int i = 0; i < 4; ++i) {
      stored |= static_cast<std::uint32_t>(static_cast<unsigned char>(stored_raw[i])) << (8 * i);
    }
    if (crc32(bytes, payload) != stored) {
      throw data_error("checksum mismatch in " + path);
    }
  }

  Cursor cur(bytes, payload, path);
  for (int i = 0; i < 8; ++i) cur.byte();
  cur.u32();

  SynthSpec spec;
  spec.p = cur.i32();
  spec.n = cur.i32();
  spec.m = cur.i32();
  spec.gamma = cur.f64();
  spec.sigma = cur.f64();
  spec.seed = cur.u64();
  LayoutFields layout;
  layout.tag = cur.u32();
  layout.k = cur.i32();
  layout.heavy = cur.f64();
  layout.light = cur.f64();
  spec.layout = decode_layout(layout, path);
  const bool has_truth = cur.byte() != 0;
  if (spec.p <= 0 || spec.n <= 0 || spec.m <= 0) {
    throw data_error("malformed dataset header (nonpositive dimensions) in " + path);
  }

  Dataset dataset{spec, {}, std::nullopt};
  dataset.batches.reserve(static_cast<std::size_t>(spec.m));
  std::vector<IndexSet> sets;
  std::vector<Eigen::VectorXd> uvecs;
  const std::size_t bitmap_bytes = static_cast<std::size_t>((spec.n + 7) / 8);
  for (int b = 0; b < spec.m; ++b) {
    const std::int64_t id = cur.i64();
    Eigen::MatrixXd x(spec.p, spec.n);
    for (Eigen::Index j = 0; j < spec.n; ++j) {
      for (Eigen::Index i = 0; i < spec.p; ++i) x(i, j) = cur.f64();
    }
    Eigen::VectorXd y(spec.n);
    for (Eigen::Index j = 0; j < spec.n; ++j) y[j] = cur.f64();
    Eigen::VectorXd u(spec.n);
    for (Eigen::Index j = 0; j < spec.n; ++j) u[j] = cur.f64();
    std::vector<int> members;
    for (std::size_t byte_idx = 0; byte_idx < bitmap_bytes; ++byte_idx) {
      const unsigned char bits = cur.byte();
      for (int bit = 0; bit < 8; ++bit) {
        const int j = static_cast<int>(byte_idx) * 8 + bit;
        if (j < spec.n && (bits & (1u << bit)) != 0) members.push_back(j);
      }
    }
    dataset.batches.emplace_back(std::move(x), std::move(y), id);
    if (has_truth) {
      sets.emplace_back(std::move(members), spec.n);
      uvecs.push_back(std::move(u));
    }
  }
  if (has_truth) {
    Eigen::VectorXd beta(spec.p);
    for (Eigen::Index i = 0; i < spec.p; ++i) beta[i] = cur.f64();
    dataset.truth = GroundTruth{Coefficients(std::move(beta)), std::move(sets),
                                std::move(uvecs)};
  }
  if (cur.remaining() != 0) {
    throw data_error("malformed dataset file (unexpected trailing bytes) in " + path);
  }
  return dataset;
}

namespace {

struct CsvRecord {
  std::vector<std::string> fields;
  std::size_t line = 0;
};

/// Splits the file into records, tracking the physical line each record
/// starts on. CRLF and LF both end records; quoted fields may span lines.
std::vector<CsvRecord> parse_csv(const std::string& text, char delimiter,
                                 const std::string& path) {
  std::vector<CsvRecord> records;
  std::size_t line = 1;
  std::size_t i = 0;
  // Skip a UTF-8 byte-order mark so the first header name matches cleanly.
  if (text.size() >= 3 && text.compare(0, 3, "\xEF\xBB\xBF") == 0) i = 3;

  while (i < text.size()) {
    CsvRecord record;
    record.line = line;
    std::string field;
    bool in_quotes = false;
    bool record_done = false;
    bool quoted_field = false;
    while (!record_done) {
      if (i >= text.size()) {
        if (in_quotes) {
          throw data_error(path + ": line " + std::to_string(record.line) +
                           ": unterminated quoted field");
        }
        break;
      }
      const char c = text[i];
      if (in_quotes) {
        if (c == '"') {
          if (i + 1 < text.size() && text[i + 1] == '"') {
            field.push_back('"');
            i += 2;
          } else {
            in_quotes = false;
            ++i;
          }
        } else {
          if (c == '\n') ++line;
          field.push_back(c);
          ++i;
        }
        continue;
      }
      switch (c) {
        case '"':
          if (field.empty() && !quoted_field) {
            in_quotes = true;
            quoted_field = true;
          } else {
            field.push_back(c);
          }
          ++i;
          break;
        case '\r':
          if (i + 1 < text.size() && text[i + 1] == '\n') {
            i += 2;
            ++line;
            record_done = true;
          } else {
            field.push_back(c);
            ++i;
          }
          break;
        case '\n':
          ++i;
          ++line;
          record_done = true;
          break;
        default:
          if (c == delimiter) {
            record.fields.push_back(std::move(field));
            field.clear();
            quoted_field = false;
            ++i;
          } else {
            field.push_back(c);
            ++i;
          }
          break;
      }
    }
    record.fields.push_back(std::move(field));
    // A lone newline (or trailing newline at EOF) yields one empty field;
    // skip such blank records instead of treating them as data rows.
    if (record.fields.size() == 1 && record.fields[0].empty()) continue;
    records.push_back(std::move(record));
  }
  return records;
}

bool parse_double(const std::string& field, double& out) {
  std::size_t begin = field.find_first_not_of(" \t");
  if (begin == std::string::npos) return false;
  std::size_t end = field.find_last_not_of(" \t") + 1;
  const char* first = field.data() + begin;
  const char* last = field.data() + end;
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc{} && ptr == last && std::isfinite(out);
}

}  // namespace

CsvData load_csv(const std::string& path, const CsvSchema& schema) {
  if (schema.target_column.empty()) {
    throw std::invalid_argument("schema target column must be named");
  }
  if (schema.feature_columns.empty()) {
    throw std::invalid_argument("schema needs at least one feature column");
  }
  for (std::size_t i = 0; i < schema.feature_columns.size(); ++i) {
    if (schema.feature_columns[i] == schema.target_column) {
      throw std::invalid_argument("target column '" + schema.target_column +
                                  "' repeats among the features");
    }
    for (std::size_t j = i + 1; j < schema.feature_columns.size(); ++j) {
      if (schema.feature_columns[i] == schema.feature_columns[j]) {
        throw std::invalid_argument("duplicate feature column '" +
                                    schema.feature_columns[i] + "'");
      }
    }
  }

  std::ifstream file(path, std::ios::binary);
  if (!file) {
    throw data_error("cannot open " + path + " for reading");
  }
  std::string text((std::istreambuf_iterator<char>(file)), std::istreambuf_iterator<char>());
  if (file.bad()) {
    throw data_error("read failed: " + path);
  }

  const std::vector<CsvRecord> records = parse_csv(text, schema.delimiter, path);
  if (records.empty()) {
    throw data_error(path + ": no header row");
  }
  const std::vector<std::string>& header = records.front().fields;

  auto column_index = [&](const std::string& name) {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) return static_cast<int>(i);
    }
    throw data_error(path + ": column '" + name + "' not found in header");
  };
  const int target_idx = column_index(schema.target_column);
  std::vector<int> feature_idx;
  feature_idx.reserve(schema.feature_columns.size());
  for (const std::string& name : schema.feature_columns) {
    feature_idx.push_back(column_index(name));
  }

  const std::size_t p = schema.feature_columns.size();
  std::vector<double> xs;
  std::vector<double> ys;
  std::int64_t dropped = 0;
  std::vector<double> row(p);
  for (std::size_t r = 1; r < records.size(); ++r) {
    const CsvRecord& record = records[r];
    if (record.fields.size() != header.size()) {
      throw data_error(path + ": line " + std::to_string(record.line) + ": expected " +
                       std::to_string(header.size()) + " fields, found " +
                       std::to_string(record.fields.size()));
    }
    double target = 0.0;
    bool ok = parse_double(record.fields[static_cast<std::size_t>(target_idx)], target);
    for (std::size_t i = 0; ok && i < p; ++i) {
      ok = parse_double(record.fields[static_cast<std::size_t>(feature_idx[i])], row[i]);
    }
    if (!ok) {
      ++dropped;
      continue;
    }
    ys.push_back(target);
    xs.insert(xs.end(), row.begin(), row.end());
  }
  if (ys.empty()) {
    throw data_error(path + ": no usable rows (" + std::to_string(dropped) + " dropped)");
  }

  CsvData data;
  const Eigen::Index count = static_cast<Eigen::Index>(ys.size());
  data.x = Eigen::Map<const Eigen::MatrixXd>(xs.data(), static_cast<Eigen::Index>(p), count);
  data.y = Eigen::Map<const Eigen::VectorXd>(ys.data(), count);
  data.dropped_rows = dropped;
  return data;
}

std::vector<MiniBatch> split_batches(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                     int batch_size, SplitOrder order, std::uint64_t seed) {
  const Eigen::Index count = x.cols();
  if (y.size() != count) {
    throw std::invalid_argument("feature columns and target length differ");
  }
  if (batch_size < 1) {
    throw std::invalid_argument("batch size must be positive");
  }
  if (static_cast<Eigen::Index>(batch_size) > count) {
    throw std::invalid_argument("batch size " + std::to_string(batch_size) +
                                " exceeds the " + std::to_string(count) + " available rows");
  }

  std::vector<Eigen::Index> perm(static_cast<std::size_t>(count));
  for (Eigen::Index i = 0; i < count; ++i) perm[static_cast<std::size_t>(i)] = i;
  if (order == SplitOrder::shuffled) {
    Rng rng(seed);
    for (Eigen::Index i = count - 1; i > 0; --i) {
      const auto j = static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(i) + 1));
      std::swap(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]);
    }
  }

  const Eigen::Index m = count / batch_size;
  std::vector<MiniBatch> batches;
  batches.reserve(static_cast<std::size_t>(m));
  for (Eigen::Index b = 0; b < m; ++b) {
    Eigen::MatrixXd bx(x.rows(), batch_size);
    Eigen::VectorXd by(batch_size);
    for (Eigen::Index j = 0; j < batch_size; ++j) {
      const Eigen::Index src = perm[static_cast<std::size_t>(b * batch_size + j)];
      bx.col(j) = x.col(src);
      by[j] = y[src];
    }
    batches.emplace_back(std::move(bx), std::move(by), static_cast<std::int64_t>(b));
  }
  return batches;
}

}  // namespace robustlsq
