#ifndef PHONECAL_TYPES_HPP
#define PHONECAL_TYPES_HPP

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace phonecal {

using Vec = std::vector<double>;

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidInput : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Ordered phone inventory; index in `labels` is the phone index everywhere.
struct PhoneSet {
  std::vector<std::string> labels;

  int size() const { return static_cast<int>(labels.size()); }
  int index_of(const std::string& label) const;
  void validate() const;
};

// Maps each pdf-id column to its base phone index.
struct PdfMap {
  std::vector<int> pdf_to_phone;

  int num_pdfs() const { return static_cast<int>(pdf_to_phone.size()); }
  void validate(const PhoneSet& phones) const;
};

// T x D row-major matrix of per-frame probabilities or log-likelihoods.
struct Matrix {
  std::string utterance_id;
  int rows = 0;
  int cols = 0;
  Vec values;  // rows * cols, row-major

  double& at(int r, int c) { return values[static_cast<size_t>(r) * cols + c]; }
  double at(int r, int c) const {
    return values[static_cast<size_t>(r) * cols + c];
  }
  const double* row(int r) const {
    return values.data() + static_cast<size_t>(r) * cols;
  }
};

using FramePosteriorMatrix = Matrix;

struct PriorVector {
  Vec values;

  int size() const { return static_cast<int>(values.size()); }
  // Entries must be strictly positive and sum to 1 within tol.
  void validate(double tol = 1e-6) const;
  static PriorVector flat(int n);
};

struct LogLikVector {
  Vec values;

  int size() const { return static_cast<int>(values.size()); }
};

struct PhoneSegment {
  std::string utterance_id;
  int phone = -1;
  int start_frame = 0;
  int end_frame = 0;  // exclusive
  std::optional<int> stress;

  int duration() const { return end_frame - start_frame; }
};

// One labeled phone with its pooled log-likelihood vector.
struct PhoneTrial {
  int true_phone = -1;
  LogLikVector llk;
  int duration = 1;  // frames, 10 ms each
  std::optional<int> stress;
};

struct CalibrationTransform {
  double alpha = 1.0;
  Vec beta;  // length N

  static CalibrationTransform identity(int n) {
    return CalibrationTransform{1.0, Vec(n, 0.0)};
  }
};

struct EvalReport {
  double h_mc = 0.0;                // nats
  Vec per_class_penalty;            // mean -log posterior per class
  std::vector<int64_t> class_counts;
  int n_active_classes = 0;
  PriorVector eval_prior;
};

}  // namespace phonecal

#endif
