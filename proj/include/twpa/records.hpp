#pragma once

// Digitized quadrature records and their on-disk formats.
//
// Binary (little-endian):
//   "TWPA" | u32 version | u32 channel_count | f64 sample_rate | u8 pump_state
//   then per sample, per channel: f64 I, f64 Q.
// CSV:
//   # twpa-records version=1 channels=N sample_rate=R pump_state=ON|OFF
//   I0,Q0,I1,Q1,...
//   one row per sample.
// Files carry no channel names; channel k is labelled "ch<k>" on read.

#include "twpa/statistics.hpp"

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace twpa::records {

enum class PumpState : std::uint8_t { Off = 0, On = 1 };

std::string to_string(PumpState state);
PumpState pump_state_from_string(const std::string& text);

enum class RecordFormat { Binary, Csv };

struct IqSample {
  double i = 0.0;
  double q = 0.0;
};

struct QuadratureRecord {
  std::string channel;
  std::vector<IqSample> samples;  // volts
  double sample_rate = 1.0;       // Hz
  PumpState pump_state = PumpState::Off;

  // Non-empty, finite samples, positive sample rate.
  void validate() const;
};

// Simultaneously digitized channels.
struct RecordSet {
  std::vector<QuadratureRecord> records;

  // Every record valid, equal lengths, common sample rate and pump state.
  void validate() const;
  std::size_t sample_count() const;
  std::vector<std::string> channels() const;
};

std::string channel_label(std::size_t index);

struct RecordHeader {
  std::uint32_t version = 1;
  std::uint32_t channel_count = 0;
  double sample_rate = 1.0;
  PumpState pump_state = PumpState::Off;
};

class RecordWriter {
 public:
  RecordWriter(const std::filesystem::path& path, RecordFormat format, const RecordHeader& header);

  // rows: n x (2 * channel_count), columns I0, Q0, I1, Q1, ...
  void write_rows(const Eigen::Ref<const stats::RowMatrix>& rows);
  // Flushes and checks the stream; throws IoError on failure.
  void close();
  std::uint64_t rows_written() const { return rows_written_; }

 private:
  std::filesystem::path path_;
  std::ofstream out_;
  RecordFormat format_;
  RecordHeader header_;
  std::uint64_t rows_written_ = 0;
  std::vector<unsigned char> buffer_;
};

class RecordReader {
 public:
  // Detects the format from the first bytes. Throws IoError.
  explicit RecordReader(const std::filesystem::path& path);

  const RecordHeader& header() const { return header_; }
  RecordFormat format() const { return format_; }
  std::vector<std::string> channels() const;
  // Reads up to max_rows rows into `block` (resized); returns the count,
  // 0 at end of file. Non-finite values raise InvalidArgument.
  std::size_t read_rows(stats::RowMatrix& block, std::size_t max_rows);

 private:
  std::filesystem::path path_;
  std::ifstream in_;
  RecordFormat format_ = RecordFormat::Binary;
  RecordHeader header_;
  std::uint64_t line_ = 0;
  std::vector<unsigned char> buffer_;
};

void write_records(const RecordSet& set, const std::filesystem::path& path, RecordFormat format);
RecordSet read_records(const std::filesystem::path& path);

stats::QuadratureStatistics record_statistics(const RecordSet& set);
// Streams the file through an accumulator without loading it.
stats::QuadratureStatistics file_statistics(const std::filesystem::path& path,
                                            std::size_t chunk_rows = 1 << 16);

}  // namespace twpa::records
