// RDAE1 stack files and paired-dataset manifests.

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "binary_io.hpp"
#include "rdae/dataset_synth.hpp"
#include "rdae/errors.hpp"

namespace rdae {
namespace {

constexpr std::string_view kStackMagic = "RDAE1";
constexpr std::string_view kManifestHeader = "rdae-dataset 1";

}  // namespace

void save_stack(const ImageStack& stack, const std::filesystem::path& path) {
  stack.validate();
  if (stack.pixels() > 0xffffffffLL || stack.count() > 0xffffffffLL)
    throw InvalidConfig("save_stack: stack too large for the file format");
  detail::ByteWriter out;
  out.bytes(kStackMagic);
  out.u32(static_cast<std::uint32_t>(stack.pixels()));
  out.u32(static_cast<std::uint32_t>(stack.count()));
  out.u8(static_cast<std::uint8_t>(stack.kind));
  out.u8(static_cast<std::uint8_t>(stack.role));
  for (const ColumnMeta& m : stack.meta) {
    out.u16(m.interval);
    out.u16(m.realization);
    out.u8(static_cast<std::uint8_t>(m.wall));
  }
  for (Eigen::Index i = 0; i < stack.data.size(); ++i) out.f64(stack.data.data()[i]);
  detail::write_file(path.string(), out.buffer());
}

ImageStack load_stack(const std::filesystem::path& path, Eigen::Index image_rows) {
  const std::vector<char> bytes = detail::read_file(path.string());
  const std::string name = path.string();
  detail::ByteReader in(bytes, name);
  if (in.bytes(kStackMagic.size()) != kStackMagic) throw FormatError(name + ": bad magic");
  const Eigen::Index pixels = in.u32();
  const Eigen::Index count = in.u32();
  const std::uint8_t kind = in.u8();
  const std::uint8_t role = in.u8();
  if (kind > 2) throw FormatError(name + ": unknown value kind");
  if (role > 1) throw FormatError(name + ": unknown stack role");
  const std::uint64_t expected =
      static_cast<std::uint64_t>(count) * 5 + static_cast<std::uint64_t>(pixels) * static_cast<std::uint64_t>(count) * 8;
  if (in.remaining() < expected) throw FormatError(name + ": truncated file");
  if (in.remaining() > expected) throw FormatError(name + ": trailing bytes");

  std::vector<ColumnMeta> meta(static_cast<std::size_t>(count));
  for (ColumnMeta& m : meta) {
    m.interval = in.u16();
    m.realization = in.u16();
    const std::uint8_t wall = in.u8();
    if (wall > 3) throw FormatError(name + ": unknown wall class");
    m.wall = static_cast<WallClass>(wall);
  }
  Eigen::MatrixXd data(pixels, count);
  for (Eigen::Index i = 0; i < data.size(); ++i) data.data()[i] = in.f64();

  if (image_rows == 0) {
    // Without a manifest assume square images.
    image_rows = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(pixels))));
    if (image_rows * image_rows != pixels) image_rows = pixels;
  }
  if (image_rows <= 0 || pixels % image_rows != 0)
    throw FormatError(name + ": pixel count does not match image_rows");
  return ImageStack(std::move(data), std::move(meta), image_rows, static_cast<SignatureKind>(kind),
                    static_cast<StackRole>(role));
}

std::filesystem::path save_dataset(const DatasetPair& pair, const std::filesystem::path& stem,
                                   std::uint64_t config_hash) {
  pair.clean.validate();
  pair.corrupt.validate();
  if (pair.clean.data.rows() != pair.corrupt.data.rows() ||
      pair.clean.data.cols() != pair.corrupt.data.cols() ||
      pair.clean.image_rows != pair.corrupt.image_rows)
    throw InvalidConfig("save_dataset: clean and corrupt stacks differ in shape");

  const std::string base = stem.filename().string();
  const std::filesystem::path dir = stem.parent_path();
  const std::string clean_name = base + "_clean.rdae";
  const std::string corrupt_name = base + "_corrupt.rdae";
  save_stack(pair.clean, dir / clean_name);
  save_stack(pair.corrupt, dir / corrupt_name);

  std::ostringstream text;
  char hash[24];
  std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(config_hash));
  text << kManifestHeader << '\n'
       << "clean=" << clean_name << '\n'
       << "corrupt=" << corrupt_name << '\n'
       << "image_rows=" << pair.clean.image_rows << '\n'
       << "config_hash=" << hash << '\n';
  const std::string s = text.str();
  const std::filesystem::path manifest = dir / (base + ".manifest");
  detail::write_file(manifest.string(), std::vector<char>(s.begin(), s.end()));
  return manifest;
}

DatasetPair load_dataset(const std::filesystem::path& manifest) {
  const std::string name = manifest.string();
  std::ifstream in(manifest);
  if (!in) throw IoError(name + ": cannot open manifest");
  std::string line;
  if (!std::getline(in, line) || line != kManifestHeader) throw FormatError(name + ": not a dataset manifest");
  std::map<std::string, std::string> fields;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw FormatError(name + ": malformed line '" + line + "'");
    fields[line.substr(0, eq)] = line.substr(eq + 1);
  }
  for (const char* key : {"clean", "corrupt", "image_rows"})
    if (!fields.count(key)) throw FormatError(name + ": missing '" + key + "'");
  Eigen::Index rows = 0;
  try {
    rows = std::stoll(fields["image_rows"]);
  } catch (const std::exception&) {
    throw FormatError(name + ": bad image_rows");
  }
  const std::filesystem::path dir = manifest.parent_path();
  DatasetPair pair;
  pair.clean = load_stack(dir / fields["clean"], rows);
  pair.corrupt = load_stack(dir / fields["corrupt"], rows);
  if (pair.clean.data.rows() != pair.corrupt.data.rows() ||
      pair.clean.data.cols() != pair.corrupt.data.cols())
    throw FormatError(name + ": clean and corrupt stacks differ in shape");
  return pair;
}

}  // namespace rdae
