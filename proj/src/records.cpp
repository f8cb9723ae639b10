#include "twpa/records.hpp"

#include "twpa/errors.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <sstream>

namespace twpa::records {

namespace {

constexpr char kMagic[4] = {'T', 'W', 'P', 'A'};
constexpr std::size_t kHeaderBytes = 4 + 4 + 4 + 8 + 1;

void put_u32(std::vector<unsigned char>& buf, std::uint32_t v) {
  for (int k = 0; k < 4; ++k) {
    buf.push_back(static_cast<unsigned char>(v >> (8 * k)));
  }
}

void put_f64(std::vector<unsigned char>& buf, double x) {
  const auto v = std::bit_cast<std::uint64_t>(x);
  for (int k = 0; k < 8; ++k) {
    buf.push_back(static_cast<unsigned char>(v >> (8 * k)));
  }
}

std::uint32_t get_u32(const unsigned char* p) {
  std::uint32_t v = 0;
  for (int k = 3; k >= 0; --k) {
    v = (v << 8) | p[k];
  }
  return v;
}

double get_f64(const unsigned char* p) {
  std::uint64_t v = 0;
  for (int k = 7; k >= 0; --k) {
    v = (v << 8) | p[k];
  }
  return std::bit_cast<double>(v);
}

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

double parse_double(std::string_view text, const std::filesystem::path& path, std::uint64_t line) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) {
    text.remove_prefix(1);
  }
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r')) {
    text.remove_suffix(1);
  }
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    std::ostringstream msg;
    msg << path.string() << ":" << line << ": cannot parse number '" << text << "'";
    throw IoError(msg.str());
  }
  return value;
}

void check_finite(double v, const std::filesystem::path& path, std::uint64_t row) {
  if (!std::isfinite(v)) {
    std::ostringstream msg;
    msg << path.string() << ": non-finite sample at row " << row;
    throw InvalidArgument(msg.str());
  }
}

}  // namespace

std::string to_string(PumpState state) { return state == PumpState::On ? "ON" : "OFF"; }

PumpState pump_state_from_string(const std::string& text) {
  if (text == "ON" || text == "on") {
    return PumpState::On;
  }
  if (text == "OFF" || text == "off") {
    return PumpState::Off;
  }
  throw InvalidArgument("pump state must be ON or OFF, got '" + text + "'");
}

std::string channel_label(std::size_t index) { return "ch" + std::to_string(index); }

void QuadratureRecord::validate() const {
  if (samples.empty()) {
    throw InvalidArgument("record '" + channel + "' is empty");
  }
  if (!(sample_rate > 0.0) || !std::isfinite(sample_rate)) {
    throw InvalidArgument("record '" + channel + "' needs a positive sample rate");
  }
  for (std::size_t k = 0; k < samples.size(); ++k) {
    if (!std::isfinite(samples[k].i) || !std::isfinite(samples[k].q)) {
      throw InvalidArgument("record '" + channel + "' has a non-finite sample at index " +
                            std::to_string(k));
    }
  }
}

void RecordSet::validate() const {
  if (records.empty()) {
    throw InvalidArgument("record set is empty");
  }
  for (const auto& r : records) {
    r.validate();
    if (r.samples.size() != records.front().samples.size() ||
        r.sample_rate != records.front().sample_rate ||
        r.pump_state != records.front().pump_state) {
      throw InvalidArgument("records in a set must share length, sample rate and pump state");
    }
  }
}

std::size_t RecordSet::sample_count() const {
  return records.empty() ? 0 : records.front().samples.size();
}

std::vector<std::string> RecordSet::channels() const {
  std::vector<std::string> out;
  for (const auto& r : records) {
    out.push_back(r.channel);
  }
  return out;
}

RecordWriter::RecordWriter(const std::filesystem::path& path, RecordFormat format,
                           const RecordHeader& header)
    : path_(path), format_(format), header_(header) {
  if (header.channel_count == 0 || !(header.sample_rate > 0.0)) {
    throw InvalidArgument("record header needs channels and a positive sample rate");
  }
  out_.open(path, std::ios::binary | std::ios::trunc);
  if (!out_) {
    throw IoError("cannot open '" + path.string() + "' for writing");
  }
  if (format_ == RecordFormat::Binary) {
    buffer_.assign(kMagic, kMagic + 4);
    put_u32(buffer_, header.version);
    put_u32(buffer_, header.channel_count);
    put_f64(buffer_, header.sample_rate);
    buffer_.push_back(static_cast<unsigned char>(header.pump_state));
    out_.write(reinterpret_cast<const char*>(buffer_.data()),
               static_cast<std::streamsize>(buffer_.size()));
  } else {
    out_ << "# twpa-records version=" << header.version << " channels=" << header.channel_count
         << " sample_rate=" << format_double(header.sample_rate)
         << " pump_state=" << to_string(header.pump_state) << "\n";
    for (std::uint32_t c = 0; c < header.channel_count; ++c) {
      out_ << (c ? "," : "") << "I" << c << ",Q" << c;
    }
    out_ << "\n";
  }
  if (!out_) {
    throw IoError("write failed on '" + path.string() + "'");
  }
}

void RecordWriter::write_rows(const Eigen::Ref<const stats::RowMatrix>& rows) {
  if (rows.cols() != 2 * static_cast<Eigen::Index>(header_.channel_count)) {
    throw InvalidArgument("RecordWriter: row width does not match the channel count");
  }
  if (format_ == RecordFormat::Binary) {
    buffer_.clear();
    buffer_.reserve(static_cast<std::size_t>(rows.size()) * 8);
    for (Eigen::Index r = 0; r < rows.rows(); ++r) {
      for (Eigen::Index c = 0; c < rows.cols(); ++c) {
        put_f64(buffer_, rows(r, c));
      }
    }
    out_.write(reinterpret_cast<const char*>(buffer_.data()),
               static_cast<std::streamsize>(buffer_.size()));
  } else {
    std::string line;
    for (Eigen::Index r = 0; r < rows.rows(); ++r) {
      line.clear();
      for (Eigen::Index c = 0; c < rows.cols(); ++c) {
        if (c) {
          line += ',';
        }
        line += format_double(rows(r, c));
      }
      line += '\n';
      out_ << line;
    }
  }
  if (!out_) {
    throw IoError("write failed on '" + path_.string() + "'");
  }
  rows_written_ += static_cast<std::uint64_t>(rows.rows());
}

void RecordWriter::close() {
  out_.flush();
  if (!out_) {
    throw IoError("write failed on '" + path_.string() + "'");
  }
  out_.close();
}

RecordReader::RecordReader(const std::filesystem::path& path) : path_(path) {
  in_.open(path, std::ios::binary);
  if (!in_) {
    throw IoError("cannot open '" + path.string() + "'");
  }
  unsigned char head[kHeaderBytes];
  in_.read(reinterpret_cast<char*>(head), 4);
  if (in_.gcount() == 4 && std::memcmp(head, kMagic, 4) == 0) {
    format_ = RecordFormat::Binary;
    in_.read(reinterpret_cast<char*>(head + 4), kHeaderBytes - 4);
    if (in_.gcount() != static_cast<std::streamsize>(kHeaderBytes - 4)) {
      throw IoError("'" + path.string() + "': truncated record header");
    }
    header_.version = get_u32(head + 4);
    header_.channel_count = get_u32(head + 8);
    header_.sample_rate = get_f64(head + 12);
    if (head[20] > 1) {
      throw IoError("'" + path.string() + "': invalid pump state byte");
    }
    header_.pump_state = static_cast<PumpState>(head[20]);
  } else {
    format_ = RecordFormat::Csv;
    in_.clear();
    in_.seekg(0);
    std::string line;
    if (!std::getline(in_, line) || line.rfind("# twpa-records", 0) != 0) {
      throw IoError("'" + path.string() + "' is neither a binary nor a CSV record file");
    }
    std::istringstream fields(line.substr(14));
    std::string kv;
    bool have_channels = false;
    bool have_rate = false;
    bool have_state = false;
    while (fields >> kv) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) {
        continue;
      }
      const std::string key = kv.substr(0, eq);
      const std::string value = kv.substr(eq + 1);
      if (key == "version") {
        header_.version = static_cast<std::uint32_t>(parse_double(value, path, 1));
      } else if (key == "channels") {
        header_.channel_count = static_cast<std::uint32_t>(parse_double(value, path, 1));
        have_channels = true;
      } else if (key == "sample_rate") {
        header_.sample_rate = parse_double(value, path, 1);
        have_rate = true;
      } else if (key == "pump_state") {
        header_.pump_state = pump_state_from_string(value);
        have_state = true;
      }
    }
    if (!have_channels || !have_rate || !have_state) {
      throw IoError("'" + path.string() + "': CSV header lacks channels, sample_rate or pump_state");
    }
    std::getline(in_, line);  // column names
    line_ = 2;
  }
  if (header_.version != 1) {
    throw IoError("'" + path.string() + "': unsupported record version " +
                  std::to_string(header_.version));
  }
  if (header_.channel_count == 0 || !(header_.sample_rate > 0.0)) {
    throw IoError("'" + path.string() + "': header needs channels and a positive sample rate");
  }
}

std::vector<std::string> RecordReader::channels() const {
  std::vector<std::string> out;
  for (std::uint32_t c = 0; c < header_.channel_count; ++c) {
    out.push_back(channel_label(c));
  }
  return out;
}

std::size_t RecordReader::read_rows(stats::RowMatrix& block, std::size_t max_rows) {
  const auto width = static_cast<Eigen::Index>(2 * header_.channel_count);
  block.resize(static_cast<Eigen::Index>(max_rows), width);
  std::size_t n = 0;
  if (format_ == RecordFormat::Binary) {
    const std::size_t row_bytes = static_cast<std::size_t>(width) * 8;
    buffer_.resize(max_rows * row_bytes);
    in_.read(reinterpret_cast<char*>(buffer_.data()), static_cast<std::streamsize>(buffer_.size()));
    const auto got = static_cast<std::size_t>(in_.gcount());
    if (got % row_bytes != 0) {
      throw IoError("'" + path_.string() + "': truncated sample row");
    }
    n = got / row_bytes;
    for (std::size_t r = 0; r < n; ++r) {
      for (Eigen::Index c = 0; c < width; ++c) {
        const double v = get_f64(buffer_.data() + r * row_bytes + static_cast<std::size_t>(c) * 8);
        check_finite(v, path_, line_ + r);
        block(static_cast<Eigen::Index>(r), c) = v;
      }
    }
    line_ += n;
  } else {
    std::string line;
    while (n < max_rows && std::getline(in_, line)) {
      ++line_;
      if (line.empty() || line == "\r") {
        continue;
      }
      std::string_view rest(line);
      for (Eigen::Index c = 0; c < width; ++c) {
        const auto comma = rest.find(',');
        if ((comma == std::string_view::npos) != (c == width - 1)) {
          std::ostringstream msg;
          msg << path_.string() << ":" << line_ << ": expected " << width << " columns";
          throw IoError(msg.str());
        }
        const double v = parse_double(rest.substr(0, comma), path_, line_);
        check_finite(v, path_, line_);
        block(static_cast<Eigen::Index>(n), c) = v;
        if (comma != std::string_view::npos) {
          rest.remove_prefix(comma + 1);
        }
      }
      ++n;
    }
  }
  block.conservativeResize(static_cast<Eigen::Index>(n), width);
  return n;
}

void write_records(const RecordSet& set, const std::filesystem::path& path, RecordFormat format) {
  set.validate();
  RecordHeader header;
  header.channel_count = static_cast<std::uint32_t>(set.records.size());
  header.sample_rate = set.records.front().sample_rate;
  header.pump_state = set.records.front().pump_state;
  RecordWriter writer(path, format, header);
  const std::size_t n = set.sample_count();
  const std::size_t chunk = 1 << 14;
  stats::RowMatrix block;
  for (std::size_t start = 0; start < n; start += chunk) {
    const std::size_t rows = std::min(chunk, n - start);
    block.resize(static_cast<Eigen::Index>(rows), 2 * static_cast<Eigen::Index>(set.records.size()));
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t c = 0; c < set.records.size(); ++c) {
        const auto& s = set.records[c].samples[start + r];
        block(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(2 * c)) = s.i;
        block(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(2 * c + 1)) = s.q;
      }
    }
    writer.write_rows(block);
  }
  writer.close();
}

RecordSet read_records(const std::filesystem::path& path) {
  RecordReader reader(path);
  const auto& h = reader.header();
  RecordSet set;
  for (std::uint32_t c = 0; c < h.channel_count; ++c) {
    QuadratureRecord r;
    r.channel = channel_label(c);
    r.sample_rate = h.sample_rate;
    r.pump_state = h.pump_state;
    set.records.push_back(std::move(r));
  }
  stats::RowMatrix block;
  while (const std::size_t n = reader.read_rows(block, 1 << 14)) {
    for (std::size_t r = 0; r < n; ++r) {
      for (std::uint32_t c = 0; c < h.channel_count; ++c) {
        set.records[c].samples.push_back({block(static_cast<Eigen::Index>(r), 2 * c),
                                          block(static_cast<Eigen::Index>(r), 2 * c + 1)});
      }
    }
  }
  set.validate();
  return set;
}

stats::QuadratureStatistics record_statistics(const RecordSet& set) {
  set.validate();
  stats::QuadratureStatistics acc(set.channels());
  const std::size_t n = set.sample_count();
  const std::size_t chunk = 1 << 14;
  const auto width = 2 * static_cast<Eigen::Index>(set.records.size());
  stats::RowMatrix block;
  for (std::size_t start = 0; start < n; start += chunk) {
    const std::size_t rows = std::min(chunk, n - start);
    block.resize(static_cast<Eigen::Index>(rows), width);
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t c = 0; c < set.records.size(); ++c) {
        const auto& s = set.records[c].samples[start + r];
        block(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(2 * c)) = s.i;
        block(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(2 * c + 1)) = s.q;
      }
    }
    acc.add_rows(block);
  }
  return acc;
}

stats::QuadratureStatistics file_statistics(const std::filesystem::path& path,
                                            std::size_t chunk_rows) {
  RecordReader reader(path);
  stats::QuadratureStatistics acc(reader.channels());
  stats::RowMatrix block;
  while (reader.read_rows(block, chunk_rows) > 0) {
    acc.add_rows(block);
  }
  if (acc.count() == 0) {
    throw InvalidArgument("'" + path.string() + "' contains no samples");
  }
  return acc;
}

}  // namespace twpa::records
