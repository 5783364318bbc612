#include "phonecal/core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

namespace phonecal {

int PhoneSet::index_of(const std::string& label) const {
  for (int i = 0; i < size(); ++i)
    if (labels[i] == label) return i;
  throw InvalidInput("unknown phone label: " + label);
}

void PhoneSet::validate() const {
  if (size() < 2) throw InvalidInput("phone set needs at least 2 classes");
  std::set<std::string> seen;
  for (const auto& l : labels) {
    if (l.empty()) throw InvalidInput("empty phone label");
    if (!seen.insert(l).second)
      throw InvalidInput("duplicate phone label: " + l);
  }
}

void PdfMap::validate(const PhoneSet& phones) const {
  for (int i = 0; i < num_pdfs(); ++i) {
    int f = pdf_to_phone[i];
    if (f < 0 || f >= phones.size()) {
      std::ostringstream os;
      os << "pdf " << i << " maps to invalid phone index " << f;
      throw FormatError(os.str());
    }
  }
}

void PriorVector::validate(double tol) const {
  double sum = 0.0;
  for (double v : values) {
    if (!(v > 0.0)) throw InvalidInput("prior entries must be positive");
    sum += v;
  }
  if (std::abs(sum - 1.0) > tol) {
    std::ostringstream os;
    os << "prior sums to " << sum << ", expected 1 within " << tol;
    throw InvalidInput(os.str());
  }
}

PriorVector PriorVector::flat(int n) {
  return PriorVector{Vec(n, 1.0 / n)};
}

Matrix reduce_pdf_posteriors(const FramePosteriorMatrix& frame,
                             const PdfMap& map, const PhoneSet& phones) {
  if (frame.cols != map.num_pdfs()) {
    std::ostringstream os;
    os << "utterance " << frame.utterance_id << ": matrix has " << frame.cols
       << " pdf columns but map covers " << map.num_pdfs();
    throw FormatError(os.str());
  }
  map.validate(phones);

  Matrix out;
  out.utterance_id = frame.utterance_id;
  out.rows = frame.rows;
  out.cols = phones.size();
  out.values.assign(static_cast<size_t>(out.rows) * out.cols, 0.0);
  for (int t = 0; t < frame.rows; ++t) {
    const double* in = frame.row(t);
    double* o = out.values.data() + static_cast<size_t>(t) * out.cols;
    for (int i = 0; i < frame.cols; ++i) o[map.pdf_to_phone[i]] += in[i];
  }
  return out;
}

PriorVector reduce_pdf_priors(const PriorVector& pdf_priors, const PdfMap& map,
                              const PhoneSet& phones) {
  if (pdf_priors.size() != map.num_pdfs())
    throw FormatError("pdf prior length does not match pdf map length");
  map.validate(phones);

  PriorVector out;
  out.values.assign(phones.size(), 0.0);
  for (int i = 0; i < map.num_pdfs(); ++i)
    out.values[map.pdf_to_phone[i]] += pdf_priors.values[i];
  for (int f = 0; f < phones.size(); ++f) {
    if (!(out.values[f] > 0.0))
      throw InvalidInput("phone '" + phones.labels[f] +
                         "' has zero prior mass after reduction");
  }
  return out;
}

LogLikVector frame_log_likelihoods(const double* phone_posterior_row, int n,
                                   const PriorVector& phone_priors,
                                   double floor) {
  if (phone_priors.size() != n)
    throw InvalidInput("prior length does not match posterior length");
  LogLikVector llk;
  llk.values.resize(n);
  for (int f = 0; f < n; ++f) {
    double p = phone_posterior_row[f];
    if (p < floor) p = floor;
    llk.values[f] = std::log(p / phone_priors.values[f]);
  }
  return llk;
}

LogLikVector frame_log_likelihoods(const Vec& phone_posterior_row,
                                   const PriorVector& phone_priors,
                                   double floor) {
  return frame_log_likelihoods(phone_posterior_row.data(),
                               static_cast<int>(phone_posterior_row.size()),
                               phone_priors, floor);
}

Vec posterior_from_loglik(const LogLikVector& llk,
                          const PriorVector& eval_prior) {
  const int n = llk.size();
  if (eval_prior.size() != n)
    throw InvalidInput("prior length does not match log-likelihood length");
  Vec logits(n);
  double mx = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    logits[i] = llk.values[i] + std::log(eval_prior.values[i]);
    mx = std::max(mx, logits[i]);
  }
  Vec out(n);
  double denom = 0.0;
  for (int i = 0; i < n; ++i) {
    out[i] = std::exp(logits[i] - mx);
    denom += out[i];
  }
  for (int i = 0; i < n; ++i) out[i] /= denom;
  return out;
}

void validate_and_renormalize_rows(Matrix& m) {
  for (int t = 0; t < m.rows; ++t) {
    double* row = m.values.data() + static_cast<size_t>(t) * m.cols;
    double sum = 0.0;
    for (int c = 0; c < m.cols; ++c) {
      if (row[c] < 0.0 || row[c] > 1.0) {
        std::ostringstream os;
        os << "utterance " << m.utterance_id << " row " << t
           << ": entry out of [0,1]";
        throw FormatError(os.str());
      }
      sum += row[c];
    }
    if (std::abs(sum - 1.0) > kRowSumTolerance) {
      std::ostringstream os;
      os << "utterance " << m.utterance_id << " row " << t << " sums to "
         << sum;
      throw FormatError(os.str());
    }
    for (int c = 0; c < m.cols; ++c) row[c] /= sum;
  }
}

}  // namespace phonecal
