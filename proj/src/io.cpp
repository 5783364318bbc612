#include "phonecal/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace phonecal::io {

namespace fs = std::filesystem;
using json = nlohmann::json;

static constexpr size_t kCsvSizeLimit = 1 << 20;

static std::ifstream open_in(const fs::path& path, bool binary) {
  std::ifstream in(path, binary ? std::ios::binary : std::ios::in);
  if (!in) throw FormatError("cannot open " + path.string());
  return in;
}

static std::ofstream open_out(const fs::path& path, bool binary) {
  std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
  if (!out) throw FormatError("cannot write " + path.string());
  return out;
}

static const char* magic_of(MatrixKind kind) {
  return kind == MatrixKind::kPosterior ? "FPM1" : "FLL1";
}

static uint32_t read_u32le(std::istream& in) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  return static_cast<uint32_t>(b[0]) | (static_cast<uint32_t>(b[1]) << 8) |
         (static_cast<uint32_t>(b[2]) << 16) |
         (static_cast<uint32_t>(b[3]) << 24);
}

static void write_u32le(std::ostream& out, uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v & 0xff),
                        static_cast<unsigned char>((v >> 8) & 0xff),
                        static_cast<unsigned char>((v >> 16) & 0xff),
                        static_cast<unsigned char>((v >> 24) & 0xff)};
  out.write(reinterpret_cast<char*>(b), 4);
}

static Matrix read_matrix_csv(const fs::path& path) {
  if (fs::file_size(path) >= kCsvSizeLimit)
    throw FormatError(path.string() +
                      ": CSV matrices are limited to 1 MB, use binary");
  auto in = open_in(path, false);
  Matrix m;
  m.utterance_id = path.stem().string();
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    int cols = 0;
    while (std::getline(ss, cell, ',')) {
      try {
        m.values.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw FormatError(path.string() + ":" + std::to_string(lineno) +
                          ": bad number '" + cell + "'");
      }
      ++cols;
    }
    if (m.cols == 0) m.cols = cols;
    if (cols != m.cols)
      throw FormatError(path.string() + ":" + std::to_string(lineno) +
                        ": ragged row");
    ++m.rows;
  }
  if (m.rows == 0) throw FormatError(path.string() + ": empty matrix");
  return m;
}

Matrix read_matrix(const fs::path& path, MatrixKind expected) {
  if (path.extension() == ".csv") return read_matrix_csv(path);
  auto in = open_in(path, true);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, magic_of(expected), 4) != 0)
    throw FormatError(path.string() + ": bad magic, expected " +
                      magic_of(expected));
  Matrix m;
  m.utterance_id = path.stem().string();
  m.rows = static_cast<int>(read_u32le(in));
  m.cols = static_cast<int>(read_u32le(in));
  if (!in || m.rows <= 0 || m.cols <= 0)
    throw FormatError(path.string() + ": bad matrix header");
  size_t count = static_cast<size_t>(m.rows) * m.cols;
  std::vector<float> buf(count);
  in.read(reinterpret_cast<char*>(buf.data()),
          static_cast<std::streamsize>(count * sizeof(float)));
  if (!in) throw FormatError(path.string() + ": truncated matrix data");
  m.values.assign(buf.begin(), buf.end());
  return m;
}

void write_matrix(const fs::path& path, const Matrix& m, MatrixKind kind) {
  if (path.extension() == ".csv") {
    auto out = open_out(path, false);
    out.precision(9);
    for (int r = 0; r < m.rows; ++r) {
      for (int c = 0; c < m.cols; ++c) {
        if (c) out << ',';
        out << m.at(r, c);
      }
      out << '\n';
    }
    return;
  }
  auto out = open_out(path, true);
  out.write(magic_of(kind), 4);
  write_u32le(out, static_cast<uint32_t>(m.rows));
  write_u32le(out, static_cast<uint32_t>(m.cols));
  std::vector<float> buf(m.values.begin(), m.values.end());
  out.write(reinterpret_cast<const char*>(buf.data()),
            static_cast<std::streamsize>(buf.size() * sizeof(float)));
}

PhoneSet read_phone_set(const fs::path& path) {
  auto in = open_in(path, false);
  PhoneSet ps;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) ps.labels.push_back(line);
  }
  ps.validate();
  return ps;
}

void write_phone_set(const fs::path& path, const PhoneSet& ps) {
  auto out = open_out(path, false);
  for (const auto& l : ps.labels) out << l << '\n';
}

PdfMap read_pdf_map(const fs::path& path, const PhoneSet& phones) {
  auto in = open_in(path, false);
  std::vector<int> entries;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos)
      throw FormatError(path.string() + ":" + std::to_string(lineno) +
                        ": expected pdf_id<TAB>phone_label");
    int pdf_id;
    try {
      pdf_id = std::stoi(line.substr(0, tab));
    } catch (const std::exception&) {
      throw FormatError(path.string() + ":" + std::to_string(lineno) +
                        ": bad pdf id");
    }
    int phone = phones.index_of(line.substr(tab + 1));
    if (pdf_id >= static_cast<int>(entries.size()))
      entries.resize(pdf_id + 1, -1);
    if (entries[pdf_id] != -1)
      throw FormatError(path.string() + ":" + std::to_string(lineno) +
                        ": duplicate pdf id " + std::to_string(pdf_id));
    entries[pdf_id] = phone;
  }
  for (size_t i = 0; i < entries.size(); ++i)
    if (entries[i] < 0)
      throw FormatError(path.string() + ": pdf id " + std::to_string(i) +
                        " missing from map");
  if (entries.empty()) throw FormatError(path.string() + ": empty pdf map");
  return PdfMap{std::move(entries)};
}

PriorVector read_priors(const fs::path& path) {
  auto in = open_in(path, false);
  PriorVector p;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    try {
      p.values.push_back(std::stod(line));
    } catch (const std::exception&) {
      throw FormatError(path.string() + ":" + std::to_string(lineno) +
                        ": bad prior value '" + line + "'");
    }
  }
  p.validate();
  return p;
}

void write_priors(const fs::path& path, const PriorVector& p) {
  auto out = open_out(path, false);
  out.precision(17);
  for (double v : p.values) out << v << '\n';
}

std::vector<PhoneSegment> read_alignment(const fs::path& path,
                                         const PhoneSet& phones) {
  auto in = open_in(path, false);
  std::string line;
  if (!std::getline(in, line))
    throw FormatError(path.string() + ": empty alignment file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "utt,phone,start,end,stress")
    throw FormatError(path.string() +
                      ": expected header utt,phone,start,end,stress");
  std::vector<PhoneSegment> segments;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string utt, phone, start, end, stress;
    std::getline(ss, utt, ',');
    std::getline(ss, phone, ',');
    std::getline(ss, start, ',');
    std::getline(ss, end, ',');
    std::getline(ss, stress, ',');
    PhoneSegment seg;
    seg.utterance_id = utt;
    try {
      seg.phone = phones.index_of(phone);
      seg.start_frame = std::stoi(start);
      seg.end_frame = std::stoi(end);
      if (!stress.empty()) seg.stress = std::stoi(stress);
    } catch (const std::exception& e) {
      throw FormatError(path.string() + ":" + std::to_string(lineno) + ": " +
                        e.what());
    }
    if (seg.end_frame <= seg.start_frame || seg.start_frame < 0)
      throw FormatError(path.string() + ":" + std::to_string(lineno) +
                        ": empty or negative segment");
    segments.push_back(std::move(seg));
  }
  return segments;
}

void write_alignment(const fs::path& path,
                     const std::vector<PhoneSegment>& segments,
                     const PhoneSet& phones) {
  auto out = open_out(path, false);
  out << "utt,phone,start,end,stress\n";
  for (const auto& seg : segments) {
    out << seg.utterance_id << ',' << phones.labels[seg.phone] << ','
        << seg.start_frame << ',' << seg.end_frame << ',';
    if (seg.stress) out << *seg.stress;
    out << '\n';
  }
}

std::vector<PhoneTrial> read_trials(const fs::path& path,
                                    const PhoneSet& phones) {
  auto in = open_in(path, false);
  std::vector<PhoneTrial> trials;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
      PhoneTrial t;
      t.true_phone = phones.index_of(j.at("phone").get<std::string>());
      t.duration = j.at("n").get<int>();
      if (!j.at("stress").is_null()) t.stress = j["stress"].get<int>();
      t.llk.values = j.at("llk").get<Vec>();
      if (t.llk.size() != phones.size())
        throw FormatError("llk length does not match phone set");
      if (t.duration < 1) throw FormatError("duration must be >= 1");
      trials.push_back(std::move(t));
    } catch (const FormatError&) {
      throw;
    } catch (const std::exception& e) {
      throw FormatError(path.string() + ":" + std::to_string(lineno) + ": " +
                        e.what());
    }
  }
  return trials;
}

void write_trials(const fs::path& path, std::span<const PhoneTrial> trials,
                  const PhoneSet& phones) {
  auto out = open_out(path, false);
  for (const PhoneTrial& t : trials) {
    json j;
    j["phone"] = phones.labels[t.true_phone];
    j["n"] = t.duration;
    j["stress"] = t.stress ? json(*t.stress) : json(nullptr);
    j["llk"] = t.llk.values;
    out << j.dump() << '\n';
  }
}

CalibrationTransform read_transform(const fs::path& path,
                                    const PhoneSet& phones) {
  auto in = open_in(path, false);
  json j;
  try {
    in >> j;
    CalibrationTransform t;
    t.alpha = j.at("alpha").get<double>();
    t.beta = j.at("beta").get<Vec>();
    auto labels = j.at("phones").get<std::vector<std::string>>();
    if (labels != phones.labels)
      throw FormatError(path.string() +
                        ": transform was fitted on a different phone set");
    if (static_cast<int>(t.beta.size()) != phones.size())
      throw FormatError(path.string() + ": beta length mismatch");
    return t;
  } catch (const FormatError&) {
    throw;
  } catch (const std::exception& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

void write_transform(const fs::path& path, const CalibrationTransform& t,
                     const PhoneSet& phones) {
  json j;
  j["alpha"] = t.alpha;
  j["beta"] = t.beta;
  j["phones"] = phones.labels;
  auto out = open_out(path, false);
  out << j.dump(2) << '\n';
}

void write_confusion_csv(const fs::path& path, const ConfusionMatrix& cm,
                         const PhoneSet& phones) {
  auto out = open_out(path, false);
  out.precision(12);
  out << "target,stress";
  for (int g : cm.hypotheses) out << ',' << phones.labels[g];
  out << '\n';
  for (size_t r = 0; r < cm.targets.size(); ++r) {
    out << phones.labels[cm.targets[r].phone] << ',';
    if (cm.targets[r].stress) out << *cm.targets[r].stress;
    for (const EerResult& e : cm.eer[r]) out << ',' << e.eer;
    out << '\n';
  }
}

void write_confusion_pgm(const fs::path& path, const ConfusionMatrix& cm) {
  auto out = open_out(path, true);
  const int h = static_cast<int>(cm.targets.size());
  const int w = static_cast<int>(cm.hypotheses.size());
  out << "P5\n" << w << ' ' << h << "\n255\n";
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      double e = std::min(cm.eer[r][c].eer, 0.25) / 0.25;
      unsigned char byte = static_cast<unsigned char>(std::lround(e * 255.0));
      out.write(reinterpret_cast<char*>(&byte), 1);
    }
  }
}

std::string file_digest(const fs::path& path) {
  auto in = open_in(path, true);
  uint64_t h = 0xcbf29ce484222325ULL;
  char buf[4096];
  while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x100000001b3ULL;
    }
    if (!in) break;
  }
  char hex[17];
  std::snprintf(hex, sizeof(hex), "%016llx",
                static_cast<unsigned long long>(h));
  return hex;
}

}  // namespace phonecal::io
