#include "rdae/image_stack.hpp"

#include <string>

#include "rdae/errors.hpp"

namespace rdae {

std::string_view to_string(WallClass w) {
  switch (w) {
    case WallClass::FreeSpace: return "free_space";
    case WallClass::LowConductivity: return "low";
    case WallClass::MediumConductivity: return "medium";
    case WallClass::HighConductivity: return "high";
  }
  return "unknown";
}

std::string_view to_string(SignatureKind k) {
  switch (k) {
    case SignatureKind::Spectrogram: return "spectrogram";
    case SignatureKind::Hrrp: return "hrrp";
    case SignatureKind::Frontal: return "frontal";
  }
  return "unknown";
}

WallClass parse_wall_class(std::string_view s) {
  if (s == "free_space" || s == "free") return WallClass::FreeSpace;
  if (s == "low") return WallClass::LowConductivity;
  if (s == "medium") return WallClass::MediumConductivity;
  if (s == "high") return WallClass::HighConductivity;
  throw InvalidConfig("unknown wall class '" + std::string(s) + "'");
}

SignatureKind parse_signature_kind(std::string_view s) {
  if (s == "spectrogram") return SignatureKind::Spectrogram;
  if (s == "hrrp") return SignatureKind::Hrrp;
  if (s == "frontal") return SignatureKind::Frontal;
  throw InvalidConfig("unknown signature kind '" + std::string(s) + "'");
}

ImageStack::ImageStack(Eigen::MatrixXd d, std::vector<ColumnMeta> m, Eigen::Index rows,
                       SignatureKind k, StackRole r)
    : data(std::move(d)), meta(std::move(m)), image_rows(rows), kind(k), role(r) {
  validate();
}

ImageStack ImageStack::select(const std::vector<Eigen::Index>& columns) const {
  ImageStack out;
  out.data.resize(data.rows(), static_cast<Eigen::Index>(columns.size()));
  out.meta.reserve(columns.size());
  for (std::size_t i = 0; i < columns.size(); ++i) {
    const Eigen::Index q = columns[i];
    if (q < 0 || q >= count()) throw InvalidConfig("select: column index out of range");
    out.data.col(static_cast<Eigen::Index>(i)) = data.col(q);
    out.meta.push_back(meta[static_cast<std::size_t>(q)]);
  }
  out.image_rows = image_rows;
  out.kind = kind;
  out.role = role;
  return out;
}

void ImageStack::validate() const {
  if (image_rows <= 0) throw InvalidConfig("image stack: image_rows must be positive");
  if (data.rows() % image_rows != 0)
    throw InvalidConfig("image stack: pixel count is not a multiple of image_rows");
  if (static_cast<Eigen::Index>(meta.size()) != data.cols())
    throw InvalidConfig("image stack: metadata length differs from column count");
}

}  // namespace rdae
