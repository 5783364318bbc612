#ifndef PHONECAL_IO_HPP
#define PHONECAL_IO_HPP

#include <filesystem>
#include <string>

#include "phonecal/metrics.hpp"
#include "phonecal/types.hpp"

namespace phonecal::io {

enum class MatrixKind { kPosterior, kLogLik };  // magic FPM1 / FLL1

// Binary matrix layout: 4-byte magic, uint32 LE rows, uint32 LE cols, then
// rows*cols float32 LE, row-major.  Files ending in .csv are plain comma
// rows (accepted below 1 MB only); the utterance id is the file stem.
Matrix read_matrix(const std::filesystem::path& path, MatrixKind expected);
void write_matrix(const std::filesystem::path& path, const Matrix& m,
                  MatrixKind kind);

PhoneSet read_phone_set(const std::filesystem::path& path);
void write_phone_set(const std::filesystem::path& path, const PhoneSet& ps);

// Lines "pdf_id<TAB>phone_label"; every pdf id in [0, D) must appear once.
PdfMap read_pdf_map(const std::filesystem::path& path, const PhoneSet& phones);

// One decimal per line.
PriorVector read_priors(const std::filesystem::path& path);
void write_priors(const std::filesystem::path& path, const PriorVector& p);

// CSV with header "utt,phone,start,end,stress"; end exclusive, stress blank
// allowed.
std::vector<PhoneSegment> read_alignment(const std::filesystem::path& path,
                                         const PhoneSet& phones);
void write_alignment(const std::filesystem::path& path,
                     const std::vector<PhoneSegment>& segments,
                     const PhoneSet& phones);

// JSON-lines, one trial per line:
//   {"phone": label, "n": int, "stress": int|null, "llk": [float; N]}
std::vector<PhoneTrial> read_trials(const std::filesystem::path& path,
                                    const PhoneSet& phones);
void write_trials(const std::filesystem::path& path,
                  std::span<const PhoneTrial> trials, const PhoneSet& phones);

// {"alpha": float, "beta": [float; N], "phones": [labels]}; the label list
// guards against applying a transform to a mismatched phone set.
CalibrationTransform read_transform(const std::filesystem::path& path,
                                    const PhoneSet& phones);
void write_transform(const std::filesystem::path& path,
                     const CalibrationTransform& t, const PhoneSet& phones);

void write_confusion_csv(const std::filesystem::path& path,
                         const ConfusionMatrix& cm, const PhoneSet& phones);

// Binary PGM (P5), one byte per cell: 0 at EER = 0, 255 at EER >= 0.25.
void write_confusion_pgm(const std::filesystem::path& path,
                         const ConfusionMatrix& cm);

// FNV-1a 64-bit digest of the file contents, as 16 hex digits.
std::string file_digest(const std::filesystem::path& path);

}  // namespace phonecal::io

#endif
