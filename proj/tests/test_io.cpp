#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include <doctest.h>

#include "phonecal/io.hpp"
#include "test_util.hpp"

using namespace phonecal;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("phonecal_test_" + std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

Matrix random_matrix(std::mt19937_64& rng, int rows, int cols) {
  Matrix m;
  m.utterance_id = "utt";
  m.rows = rows;
  m.cols = cols;
  std::uniform_real_distribution<float> d(-10.f, 10.f);
  for (int i = 0; i < rows * cols; ++i)
    m.values.push_back(static_cast<double>(d(rng)));
  return m;
}

}  // namespace

TEST_CASE("binary matrix round-trips bit-exactly") {
  TempDir tmp;
  std::mt19937_64 rng(101);
  for (int rep = 0; rep < 10; ++rep) {
    Matrix m = random_matrix(rng, 1 + static_cast<int>(rng() % 20),
                             1 + static_cast<int>(rng() % 10));
    fs::path p = tmp.path / "m.fll";
    io::write_matrix(p, m, io::MatrixKind::kLogLik);
    Matrix back = io::read_matrix(p, io::MatrixKind::kLogLik);
    CHECK(back.rows == m.rows);
    CHECK(back.cols == m.cols);
    CHECK(back.values == m.values);  // values were float-representable
  }
}

TEST_CASE("matrix magic mismatch is rejected") {
  TempDir tmp;
  std::mt19937_64 rng(103);
  Matrix m = random_matrix(rng, 2, 2);
  fs::path p = tmp.path / "m.fpm";
  io::write_matrix(p, m, io::MatrixKind::kPosterior);
  CHECK_THROWS_AS(io::read_matrix(p, io::MatrixKind::kLogLik), FormatError);
}

TEST_CASE("truncated matrix is rejected") {
  TempDir tmp;
  fs::path p = tmp.path / "m.fll";
  std::ofstream out(p, std::ios::binary);
  out << "FLL1";
  char zeros[8] = {4, 0, 0, 0, 4, 0, 0, 0};
  out.write(zeros, 8);
  out.close();
  CHECK_THROWS_AS(io::read_matrix(p, io::MatrixKind::kLogLik), FormatError);
}

TEST_CASE("csv matrix round-trips") {
  TempDir tmp;
  Matrix m;
  m.rows = 2;
  m.cols = 3;
  m.values = {0.5, 0.25, 0.25, 0.125, 0.5, 0.375};
  fs::path p = tmp.path / "u1.csv";
  io::write_matrix(p, m, io::MatrixKind::kPosterior);
  Matrix back = io::read_matrix(p, io::MatrixKind::kPosterior);
  CHECK(back.utterance_id == "u1");
  CHECK(back.values == m.values);

  std::ofstream(tmp.path / "bad.csv") << "1,2\n3\n";
  CHECK_THROWS_AS(
      io::read_matrix(tmp.path / "bad.csv", io::MatrixKind::kPosterior),
      FormatError);
}

TEST_CASE("phone set, pdf map and priors files") {
  TempDir tmp;
  PhoneSet ps = test::make_phones(3);
  io::write_phone_set(tmp.path / "phones.txt", ps);
  PhoneSet back = io::read_phone_set(tmp.path / "phones.txt");
  CHECK(back.labels == ps.labels);

  std::ofstream(tmp.path / "map.tsv") << "0\tph0\n1\tph0\n2\tph1\n3\tph2\n";
  PdfMap map = io::read_pdf_map(tmp.path / "map.tsv", ps);
  CHECK(map.pdf_to_phone == std::vector<int>{0, 0, 1, 2});

  std::ofstream(tmp.path / "gap.tsv") << "0\tph0\n2\tph1\n";
  CHECK_THROWS_AS(io::read_pdf_map(tmp.path / "gap.tsv", ps), FormatError);
  std::ofstream(tmp.path / "dup.tsv") << "0\tph0\n0\tph1\n";
  CHECK_THROWS_AS(io::read_pdf_map(tmp.path / "dup.tsv", ps), FormatError);

  PriorVector pv{{0.25, 0.5, 0.25}};
  io::write_priors(tmp.path / "priors.txt", pv);
  CHECK(io::read_priors(tmp.path / "priors.txt").values == pv.values);
}

TEST_CASE("alignment csv round-trips and validates") {
  TempDir tmp;
  PhoneSet ps = test::make_phones(3);
  std::vector<PhoneSegment> segs;
  segs.push_back({"u1", 0, 0, 5, std::nullopt});
  segs.push_back({"u1", 2, 5, 9, 1});
  io::write_alignment(tmp.path / "ali.csv", segs, ps);
  auto back = io::read_alignment(tmp.path / "ali.csv", ps);
  REQUIRE(back.size() == 2);
  CHECK(back[0].phone == 0);
  CHECK(!back[0].stress);
  CHECK(back[1].stress == 1);
  CHECK(back[1].start_frame == 5);
  CHECK(back[1].end_frame == 9);

  std::ofstream(tmp.path / "bad.csv") << "utt,phone,start,end,stress\n"
                                      << "u1,ph0,5,5,\n";
  CHECK_THROWS_AS(io::read_alignment(tmp.path / "bad.csv", ps), FormatError);
  std::ofstream(tmp.path / "hdr.csv") << "utt,phone,begin,end\n";
  CHECK_THROWS_AS(io::read_alignment(tmp.path / "hdr.csv", ps), FormatError);
}

TEST_CASE("trials jsonl round-trips exactly") {
  TempDir tmp;
  PhoneSet ps = test::make_phones(4);
  std::mt19937_64 rng(107);
  std::vector<PhoneTrial> trials;
  for (int k = 0; k < 25; ++k) {
    PhoneTrial t;
    t.true_phone = static_cast<int>(rng() % 4);
    t.duration = 1 + static_cast<int>(rng() % 12);
    if (rng() % 2) t.stress = static_cast<int>(rng() % 3);
    t.llk.values = test::random_vec(rng, 4, -30, 30);
    trials.push_back(std::move(t));
  }
  io::write_trials(tmp.path / "t.jsonl", trials, ps);
  auto back = io::read_trials(tmp.path / "t.jsonl", ps);
  REQUIRE(back.size() == trials.size());
  for (size_t k = 0; k < trials.size(); ++k) {
    CHECK(back[k].true_phone == trials[k].true_phone);
    CHECK(back[k].duration == trials[k].duration);
    CHECK(back[k].stress == trials[k].stress);
    CHECK(back[k].llk.values == trials[k].llk.values);
  }

  std::ofstream(tmp.path / "bad.jsonl")
      << R"({"phone":"ph0","n":1,"stress":null,"llk":[0,0]})" << "\n";
  CHECK_THROWS_AS(io::read_trials(tmp.path / "bad.jsonl", ps), FormatError);
}

TEST_CASE("transform json guards the phone set") {
  TempDir tmp;
  PhoneSet ps = test::make_phones(3);
  CalibrationTransform t{0.75, {0.1, -0.3, 0.2}};
  io::write_transform(tmp.path / "t.json", t, ps);
  CalibrationTransform back = io::read_transform(tmp.path / "t.json", ps);
  CHECK(back.alpha == t.alpha);
  CHECK(back.beta == t.beta);

  PhoneSet other = test::make_phones(3);
  other.labels[1] = "zz";
  CHECK_THROWS_AS(io::read_transform(tmp.path / "t.json", other), FormatError);
}

TEST_CASE("confusion pgm encodes the eer scale") {
  TempDir tmp;
  ConfusionMatrix cm;
  cm.targets = {{0, std::nullopt}, {1, std::nullopt}};
  cm.hypotheses = {0, 1};
  EerResult zero, quarter, half;
  zero.eer = 0.0;
  quarter.eer = 0.125;
  half.eer = 0.5;
  cm.eer = {{zero, quarter}, {half, zero}};
  io::write_confusion_pgm(tmp.path / "cm.pgm", cm);
  std::ifstream in(tmp.path / "cm.pgm", std::ios::binary);
  std::string header;
  std::getline(in, header);
  CHECK(header == "P5");
  std::string dims, maxval;
  std::getline(in, dims);
  std::getline(in, maxval);
  CHECK(dims == "2 2");
  CHECK(maxval == "255");
  unsigned char bytes[4];
  in.read(reinterpret_cast<char*>(bytes), 4);
  CHECK(bytes[0] == 0);    // eer 0
  CHECK(bytes[1] == 128);  // eer 0.125 = half scale
  CHECK(bytes[2] == 255);  // clamped at 0.25
  CHECK(bytes[3] == 0);
}

TEST_CASE("file digest is stable and content sensitive") {
  TempDir tmp;
  std::ofstream(tmp.path / "a") << "hello";
  std::ofstream(tmp.path / "b") << "hello";
  std::ofstream(tmp.path / "c") << "hello!";
  CHECK(io::file_digest(tmp.path / "a") == io::file_digest(tmp.path / "b"));
  CHECK(io::file_digest(tmp.path / "a") != io::file_digest(tmp.path / "c"));
  CHECK(io::file_digest(tmp.path / "a").size() == 16);
}
