#include "twpa/errors.hpp"
#include "twpa/records.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>

using namespace twpa;
using namespace twpa::records;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "twpa_records_test";
  fs::create_directories(dir);
  return dir / name;
}

RecordSet make_set(std::size_t channels, std::size_t n, std::uint64_t seed, PumpState state) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1e-3);
  RecordSet set;
  for (std::size_t c = 0; c < channels; ++c) {
    QuadratureRecord r;
    r.channel = channel_label(c);
    r.sample_rate = 1.25e6;
    r.pump_state = state;
    for (std::size_t k = 0; k < n; ++k) {
      r.samples.push_back({g(rng), g(rng)});
    }
    set.records.push_back(std::move(r));
  }
  // Awkward values that a short decimal form would not round-trip.
  set.records[0].samples[0] = {0.1 + 0.2, -std::numeric_limits<double>::denorm_min()};
  set.records[0].samples[1] = {std::numeric_limits<double>::max(), -0.0};
  return set;
}

void expect_same(const RecordSet& a, const RecordSet& b) {
  ASSERT_EQ(a.records.size(), b.records.size());
  for (std::size_t c = 0; c < a.records.size(); ++c) {
    EXPECT_EQ(a.records[c].channel, b.records[c].channel);
    EXPECT_EQ(a.records[c].sample_rate, b.records[c].sample_rate);
    EXPECT_EQ(a.records[c].pump_state, b.records[c].pump_state);
    ASSERT_EQ(a.records[c].samples.size(), b.records[c].samples.size());
    for (std::size_t k = 0; k < a.records[c].samples.size(); ++k) {
      EXPECT_EQ(a.records[c].samples[k].i, b.records[c].samples[k].i);
      EXPECT_EQ(a.records[c].samples[k].q, b.records[c].samples[k].q);
    }
  }
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

std::string read_bytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST(PumpState, TextForm) {
  EXPECT_EQ(to_string(PumpState::On), "ON");
  EXPECT_EQ(to_string(PumpState::Off), "OFF");
  EXPECT_EQ(pump_state_from_string("ON"), PumpState::On);
  EXPECT_EQ(pump_state_from_string("OFF"), PumpState::Off);
  EXPECT_THROW(pump_state_from_string("maybe"), InvalidArgument);
}

TEST(RecordSet, Validation) {
  auto set = make_set(2, 10, 1, PumpState::On);
  EXPECT_NO_THROW(set.validate());
  EXPECT_EQ(set.sample_count(), 10u);
  EXPECT_EQ(set.channels(), (std::vector<std::string>{"ch0", "ch1"}));
  set.records[1].samples.pop_back();
  EXPECT_THROW(set.validate(), InvalidArgument);
  set = make_set(2, 10, 1, PumpState::On);
  set.records[1].pump_state = PumpState::Off;
  EXPECT_THROW(set.validate(), InvalidArgument);
  set = make_set(2, 10, 1, PumpState::On);
  set.records[0].samples[5].q = std::nan("");
  EXPECT_THROW(set.validate(), InvalidArgument);
  set = make_set(1, 10, 1, PumpState::On);
  set.records[0].sample_rate = 0.0;
  EXPECT_THROW(set.validate(), InvalidArgument);
  EXPECT_THROW(RecordSet{}.validate(), InvalidArgument);
}

TEST(RecordFiles, BinaryRoundTripIsExact) {
  const auto set = make_set(2, 50000, 2, PumpState::On);
  const auto path = scratch("round.twpa");
  write_records(set, path, RecordFormat::Binary);
  EXPECT_EQ(fs::file_size(path), 21u + 50000u * 4u * 8u);
  const auto bytes = read_bytes(path);
  EXPECT_EQ(bytes.substr(0, 4), "TWPA");
  EXPECT_EQ(static_cast<unsigned char>(bytes[20]), 1u);
  expect_same(read_records(path), set);
  RecordReader reader(path);
  EXPECT_EQ(reader.format(), RecordFormat::Binary);
  EXPECT_EQ(reader.header().channel_count, 2u);
  EXPECT_EQ(reader.header().sample_rate, 1.25e6);
}

TEST(RecordFiles, CsvRoundTripIsExact) {
  const auto set = make_set(3, 2000, 3, PumpState::Off);
  const auto path = scratch("round.csv");
  write_records(set, path, RecordFormat::Csv);
  const auto text = read_bytes(path);
  EXPECT_EQ(text.rfind("# twpa-records version=1 channels=3 sample_rate=1250000 pump_state=OFF\n", 0), 0u);
  EXPECT_NE(text.find("\nI0,Q0,I1,Q1,I2,Q2\n"), std::string::npos);
  expect_same(read_records(path), set);
  EXPECT_EQ(RecordReader(path).format(), RecordFormat::Csv);
}

TEST(RecordFiles, ChunkedReadsCoverEveryRow) {
  const auto set = make_set(1, 1001, 4, PumpState::On);
  const auto path = scratch("chunks.twpa");
  write_records(set, path, RecordFormat::Binary);
  RecordReader reader(path);
  stats::RowMatrix block;
  std::size_t total = 0;
  std::size_t reads = 0;
  while (const std::size_t n = reader.read_rows(block, 100)) {
    EXPECT_EQ(block.rows(), static_cast<Eigen::Index>(n));
    EXPECT_EQ(block(0, 0), set.records[0].samples[total].i);
    total += n;
    ++reads;
  }
  EXPECT_EQ(total, 1001u);
  EXPECT_EQ(reads, 11u);
}

TEST(RecordFiles, StreamingStatisticsMatchInMemory) {
  auto set = make_set(2, 30000, 5, PumpState::On);
  set.records[0].samples[1] = {2e-3, 1e-3};
  const auto path = scratch("stats.twpa");
  write_records(set, path, RecordFormat::Binary);
  const auto mem = record_statistics(set);
  const auto file = file_statistics(path, 777);
  EXPECT_EQ(file.count(), mem.count());
  EXPECT_EQ(file.channels(), mem.channels());
  const double scale = mem.covariance().cwiseAbs().maxCoeff();
  EXPECT_LT((file.covariance() - mem.covariance()).cwiseAbs().maxCoeff(), 1e-12 * scale);
}

TEST(RecordFiles, RejectsMalformedFiles) {
  const auto missing = scratch("does_not_exist.twpa");
  fs::remove(missing);
  EXPECT_THROW(RecordReader{missing}, IoError);

  const auto junk = scratch("junk.bin");
  write_text(junk, "hello world\n");
  EXPECT_THROW(RecordReader{junk}, IoError);

  const auto short_header = scratch("short.twpa");
  write_text(short_header, "TWPA\x01");
  EXPECT_THROW(RecordReader{short_header}, IoError);

  const auto set = make_set(1, 10, 6, PumpState::On);
  const auto truncated = scratch("truncated.twpa");
  write_records(set, truncated, RecordFormat::Binary);
  fs::resize_file(truncated, fs::file_size(truncated) - 3);
  EXPECT_THROW(read_records(truncated), IoError);

  const auto bad_version = scratch("version.csv");
  write_text(bad_version, "# twpa-records version=7 channels=1 sample_rate=1 pump_state=ON\nI0,Q0\n1,2\n");
  EXPECT_THROW(RecordReader{bad_version}, IoError);

  const auto bad_state = scratch("state.csv");
  write_text(bad_state, "# twpa-records version=1 channels=1 sample_rate=1 pump_state=HALF\nI0,Q0\n1,2\n");
  EXPECT_THROW(RecordReader{bad_state}, Error);

  const auto bad_columns = scratch("columns.csv");
  write_text(bad_columns, "# twpa-records version=1 channels=1 sample_rate=1 pump_state=ON\nI0,Q0\n1,2,3\n");
  EXPECT_THROW(read_records(bad_columns), IoError);

  const auto bad_number = scratch("number.csv");
  write_text(bad_number, "# twpa-records version=1 channels=1 sample_rate=1 pump_state=ON\nI0,Q0\n1,abc\n");
  EXPECT_THROW(read_records(bad_number), IoError);

  const auto empty = scratch("empty.csv");
  write_text(empty, "# twpa-records version=1 channels=1 sample_rate=1 pump_state=ON\nI0,Q0\n");
  EXPECT_THROW(read_records(empty), InvalidArgument);
  EXPECT_THROW(file_statistics(empty), InvalidArgument);
}

TEST(RecordFiles, RejectsNonFiniteSamples) {
  const auto csv = scratch("nan.csv");
  write_text(csv, "# twpa-records version=1 channels=1 sample_rate=1 pump_state=ON\nI0,Q0\n1,2\nnan,0\n");
  EXPECT_THROW(read_records(csv), InvalidArgument);

  const auto bin = scratch("inf.twpa");
  RecordHeader h;
  h.channel_count = 1;
  RecordWriter writer(bin, RecordFormat::Binary, h);
  stats::RowMatrix rows(2, 2);
  rows << 1.0, 2.0, std::numeric_limits<double>::infinity(), 0.0;
  writer.write_rows(rows);
  writer.close();
  EXPECT_EQ(writer.rows_written(), 2u);
  EXPECT_THROW(file_statistics(bin), InvalidArgument);
}

TEST(RecordWriter, RejectsBadHeaderAndWidth) {
  RecordHeader h;
  EXPECT_THROW(RecordWriter(scratch("bad.twpa"), RecordFormat::Binary, h), InvalidArgument);
  h.channel_count = 2;
  RecordWriter writer(scratch("width.twpa"), RecordFormat::Binary, h);
  EXPECT_THROW(writer.write_rows(stats::RowMatrix::Zero(3, 2)), InvalidArgument);
  EXPECT_THROW(RecordWriter(fs::path("/nonexistent_dir/x.twpa"), RecordFormat::Binary, h), IoError);
}
