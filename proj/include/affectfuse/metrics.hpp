#pragma once

#include <cstdint>
#include <iomanip>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "affectfuse/errors.hpp"
#include "affectfuse/labels.hpp"

namespace affectfuse {

/// A square count matrix over any ordered label space.
/// Rows are predicted labels, columns are actual labels.
class ConfusionMatrix {
  public:
    explicit ConfusionMatrix(std::vector<std::string> label_space)
        : labels_(std::move(label_space)),
          counts_(labels_.size() * labels_.size(), 0) {
        for (std::size_t i = 0; i < labels_.size(); ++i) index_[labels_[i]] = i;
        if (index_.size() != labels_.size()) {
            throw Error("confusion matrix label space contains duplicates");
        }
        if (labels_.empty()) {
            throw Error("confusion matrix label space must be non-empty");
        }
    }

    /// A 5x5 matrix over the emotion vocabulary in label order.
    static ConfusionMatrix over_emotions() {
        std::vector<std::string> names;
        for (EmotionLabel e : kEmotions) names.emplace_back(to_string(e));
        return ConfusionMatrix(std::move(names));
    }

    /// A matrix over one cue's label space in label order.
    static ConfusionMatrix over_cue_space(CueKind cue) {
        std::vector<std::string> names;
        for (std::size_t i = 0; i < label_space_size(cue); ++i) {
            names.emplace_back(label_name(cue, i));
        }
        return ConfusionMatrix(std::move(names));
    }

    const std::vector<std::string>& labels() const noexcept { return labels_; }
    std::size_t size() const noexcept { return labels_.size(); }

    std::size_t index_of(std::string_view label) const {
        auto it = index_.find(std::string(label));
        if (it == index_.end()) {
            throw UnknownLabelError("label \"" + std::string(label) +
                                    "\" is not in this matrix's label space");
        }
        return it->second;
    }

    /// Increments the (predicted, actual) cell by one.
    void record(std::string_view predicted, std::string_view actual) {
        record_by_index(index_of(predicted), index_of(actual));
    }

    void record_by_index(std::size_t predicted, std::size_t actual) {
        if (predicted >= size() || actual >= size()) {
            throw UnknownLabelError("confusion matrix index out of range");
        }
        counts_[predicted * size() + actual] += 1;
    }

    std::uint64_t at(std::size_t predicted, std::size_t actual) const {
        return counts_[predicted * size() + actual];
    }

    std::uint64_t total() const noexcept {
        std::uint64_t t = 0;
        for (std::uint64_t c : counts_) t += c;
        return t;
    }

    std::uint64_t trace() const noexcept {
        std::uint64_t t = 0;
        for (std::size_t i = 0; i < size(); ++i) t += at(i, i);
        return t;
    }

    std::uint64_t row_sum(std::size_t predicted) const {
        std::uint64_t t = 0;
        for (std::size_t a = 0; a < size(); ++a) t += at(predicted, a);
        return t;
    }

    std::uint64_t column_sum(std::size_t actual) const {
        std::uint64_t t = 0;
        for (std::size_t p = 0; p < size(); ++p) t += at(p, actual);
        return t;
    }

    /// Element-wise sum; requires an identical label space (same order).
    ConfusionMatrix& merge(const ConfusionMatrix& other) {
        if (labels_ != other.labels_) {
            throw SpaceMismatchError("cannot merge confusion matrices over different label spaces");
        }
        for (std::size_t i = 0; i < counts_.size(); ++i) counts_[i] += other.counts_[i];
        return *this;
    }

    friend ConfusionMatrix merged(ConfusionMatrix a, const ConfusionMatrix& b) {
        a.merge(b);
        return a;
    }

    friend bool operator==(const ConfusionMatrix& a, const ConfusionMatrix& b) {
        return a.labels_ == b.labels_ && a.counts_ == b.counts_;
    }

  private:
    std::vector<std::string> labels_;
    std::vector<std::uint64_t> counts_;  // row-major, row = predicted
    std::unordered_map<std::string, std::size_t> index_;
};

// ─── Summary ─────────────────────────────────────────────────────────────────

/// Per-class metrics. A metric whose denominator is zero is reported as
/// absent, never as 0.0, and is excluded from macro averages.
struct ClassMetrics {
    std::optional<double> precision;
    std::optional<double> recall;
    std::optional<double> f1;
};

struct MatrixSummary {
    double accuracy = 0.0;
    std::vector<ClassMetrics> per_class;  // by label order
    std::optional<double> macro_precision;
    std::optional<double> macro_recall;
    std::optional<double> macro_f1;
};

namespace detail {

inline std::optional<double> mean_of_defined(const std::vector<std::optional<double>>& xs) {
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& x : xs) {
        if (x) {
            sum += *x;
            ++n;
        }
    }
    if (n == 0) return std::nullopt;
    return sum / static_cast<double>(n);
}

}  // namespace detail

/// Accuracy, per-class precision/recall/F1, and macro averages.
/// accuracy = trace/total; recall(c) = diagonal/column-sum; precision(c) =
/// diagonal/row-sum; F1 is their harmonic mean, undefined when either
/// factor is undefined or both are zero.
inline MatrixSummary summarize(const ConfusionMatrix& m) {
    const std::uint64_t total = m.total();
    if (total == 0) {
        throw EmptyMatrixError("cannot summarize a confusion matrix with no events");
    }
    MatrixSummary s;
    s.accuracy = static_cast<double>(m.trace()) / static_cast<double>(total);

    std::vector<std::optional<double>> precisions, recalls, f1s;
    for (std::size_t c = 0; c < m.size(); ++c) {
        ClassMetrics cm;
        const std::uint64_t diag = m.at(c, c);
        const std::uint64_t row = m.row_sum(c);
        const std::uint64_t col = m.column_sum(c);
        if (row > 0) cm.precision = static_cast<double>(diag) / static_cast<double>(row);
        if (col > 0) cm.recall = static_cast<double>(diag) / static_cast<double>(col);
        if (cm.precision && cm.recall && (*cm.precision + *cm.recall) > 0.0) {
            cm.f1 = 2.0 * (*cm.precision) * (*cm.recall) / (*cm.precision + *cm.recall);
        }
        precisions.push_back(cm.precision);
        recalls.push_back(cm.recall);
        f1s.push_back(cm.f1);
        s.per_class.push_back(cm);
    }
    s.macro_precision = detail::mean_of_defined(precisions);
    s.macro_recall = detail::mean_of_defined(recalls);
    s.macro_f1 = detail::mean_of_defined(f1s);
    return s;
}

// ─── Text rendering ──────────────────────────────────────────────────────────

namespace detail {

inline std::string metric_cell(const std::optional<double>& v) {
    if (!v) return "-";
    std::ostringstream os;
    os << std::fixed << std::setprecision(4) << *v;
    return os.str();
}

}  // namespace detail

/// Renders counts as an aligned table, rows predicted, columns actual,
/// in label order.
inline std::string format_matrix(const ConfusionMatrix& m, std::string_view title = "") {
    std::size_t width = 9;  // fits "predicted"
    for (const auto& l : m.labels()) width = std::max(width, l.size());
    for (std::size_t p = 0; p < m.size(); ++p) {
        for (std::size_t a = 0; a < m.size(); ++a) {
            width = std::max(width, std::to_string(m.at(p, a)).size());
        }
    }
    std::ostringstream os;
    if (!title.empty()) os << title << "\n";
    os << std::setw(static_cast<int>(width)) << "predicted" << " \\";
    for (const auto& l : m.labels()) os << " " << std::setw(static_cast<int>(width)) << l;
    os << "\n";
    for (std::size_t p = 0; p < m.size(); ++p) {
        os << std::setw(static_cast<int>(width)) << m.labels()[p] << "  ";
        for (std::size_t a = 0; a < m.size(); ++a) {
            os << " " << std::setw(static_cast<int>(width)) << m.at(p, a);
        }
        os << "\n";
    }
    return os.str();
}

/// Renders a summary as an aligned per-class table plus macro lines.
inline std::string format_summary(const ConfusionMatrix& m, const MatrixSummary& s) {
    std::size_t width = 9;
    for (const auto& l : m.labels()) width = std::max(width, l.size());
    std::ostringstream os;
    os << "accuracy " << detail::metric_cell(s.accuracy) << "\n";
    os << std::setw(static_cast<int>(width)) << "class"
       << "  precision     recall         f1\n";
    for (std::size_t c = 0; c < m.size(); ++c) {
        os << std::setw(static_cast<int>(width)) << m.labels()[c] << "  "
           << std::setw(9) << detail::metric_cell(s.per_class[c].precision) << "  "
           << std::setw(9) << detail::metric_cell(s.per_class[c].recall) << "  "
           << std::setw(9) << detail::metric_cell(s.per_class[c].f1) << "\n";
    }
    os << std::setw(static_cast<int>(width)) << "macro" << "  "
       << std::setw(9) << detail::metric_cell(s.macro_precision) << "  "
       << std::setw(9) << detail::metric_cell(s.macro_recall) << "  "
       << std::setw(9) << detail::metric_cell(s.macro_f1) << "\n";
    return os.str();
}

}  // namespace affectfuse
