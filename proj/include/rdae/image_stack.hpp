#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace rdae {

enum class WallClass : std::uint8_t {
  FreeSpace = 0,
  LowConductivity = 1,
  MediumConductivity = 2,
  HighConductivity = 3,
};

enum class SignatureKind : std::uint8_t {
  Spectrogram = 0,
  Hrrp = 1,
  Frontal = 2,
};

enum class StackRole : std::uint8_t { Clean = 0, Corrupt = 1 };

std::string_view to_string(WallClass w);
std::string_view to_string(SignatureKind k);
WallClass parse_wall_class(std::string_view s);
SignatureKind parse_signature_kind(std::string_view s);

struct ColumnMeta {
  std::uint16_t interval = 0;
  std::uint16_t realization = 0;
  WallClass wall = WallClass::FreeSpace;

  friend bool operator==(const ColumnMeta&, const ColumnMeta&) = default;
};

// Q vectorized images of P pixels each, stacked column-wise. Each image is an
// image_rows x (P / image_rows) picture stored column-major, so rows are the
// Doppler / range / elevation axis and columns are time / azimuth.
struct ImageStack {
  Eigen::MatrixXd data;
  std::vector<ColumnMeta> meta;
  Eigen::Index image_rows = 0;
  SignatureKind kind = SignatureKind::Spectrogram;
  StackRole role = StackRole::Clean;

  ImageStack() = default;
  ImageStack(Eigen::MatrixXd d, std::vector<ColumnMeta> m, Eigen::Index rows,
             SignatureKind k, StackRole r);

  Eigen::Index pixels() const { return data.rows(); }
  Eigen::Index count() const { return data.cols(); }
  Eigen::Index image_cols() const { return image_rows == 0 ? 0 : data.rows() / image_rows; }

  // One column viewed as an image_rows x image_cols matrix.
  Eigen::Map<const Eigen::MatrixXd> image(Eigen::Index q) const {
    return {data.col(q).data(), image_rows, image_cols()};
  }

  // Columns selected by index, in the order given.
  ImageStack select(const std::vector<Eigen::Index>& columns) const;

  // Throws InvalidConfig if shapes or metadata length are inconsistent.
  void validate() const;
};

// Clean / corrupt pair sharing (P, Q) and, before any label shuffling, the
// same per-column metadata.
struct DatasetPair {
  ImageStack clean;
  ImageStack corrupt;
};

}  // namespace rdae
