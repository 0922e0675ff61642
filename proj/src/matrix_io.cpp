#include "efo/matrix_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <mutex>

#include <nlohmann/json.hpp>

#include "efo/error.hpp"

namespace efo {

namespace {

// The formats are little-endian by definition; this code targets
// little-endian hosts and writes native representations directly.
static_assert(std::endian::native == std::endian::little,
              "matrix and score files require a little-endian host");

template <typename T>
void write_raw(std::ostream& out, const T& value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T read_raw(std::istream& in) {
  T value{};
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!in) raise(ErrorCode::Io, "unexpected end of binary stream");
  return value;
}

nlohmann::json read_header_line(std::istream& in, const std::string& path) {
  std::string line;
  if (!std::getline(in, line)) {
    raise(ErrorCode::Io, "missing header line: " + path);
  }
  auto j = nlohmann::json::parse(line, nullptr, false);
  if (j.is_discarded()) {
    raise(ErrorCode::Parse, "bad JSON header: " + path);
  }
  return j;
}

}  // namespace

void save_matrix_set(const MatrixSet& set, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) raise(ErrorCode::Io, "cannot write matrix file: " + path);

  nlohmann::json header{{"entities", set.entity_count},
                        {"relations", set.relations.size()},
                        {"dtype", "f64"},
                        {"layout", "row-sparse"}};
  out << header.dump() << '\n';

  for (const FuzzyMatrix& m : set.relations) {
    if (m.layout() == FuzzyMatrix::Layout::RowSparse) {
      write_raw<std::uint8_t>(out, 0);
      std::uint32_t nonempty = 0;
      for (EntityId i = 0; i < m.size(); ++i) {
        nonempty += !m.sparse_row(i).empty();
      }
      write_raw<std::uint32_t>(out, nonempty);
      for (EntityId i = 0; i < m.size(); ++i) {
        auto row = m.sparse_row(i);
        if (row.empty()) continue;
        write_raw<std::uint32_t>(out, i);
        write_raw<std::uint32_t>(out, static_cast<std::uint32_t>(row.size()));
        for (const auto& e : row) {
          write_raw<std::uint32_t>(out, e.col);
          write_raw<double>(out, e.val);
        }
      }
    } else {
      write_raw<std::uint8_t>(out, 1);
      for (EntityId i = 0; i < m.size(); ++i) {
        for (EntityId j = 0; j < m.size(); ++j) {
          write_raw<double>(out, m.at(i, j));
        }
      }
    }
  }
  if (!out) raise(ErrorCode::Io, "short write: " + path);
}

MatrixSet load_matrix_set(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(ErrorCode::Io, "cannot open matrix file: " + path);

  auto header = read_header_line(in, path);
  MatrixSet set;
  set.entity_count = header.at("entities").get<std::size_t>();
  auto relations = header.at("relations").get<std::size_t>();
  if (header.at("dtype") != "f64") {
    raise(ErrorCode::Parse, "unsupported matrix dtype");
  }

  for (std::size_t r = 0; r < relations; ++r) {
    auto block_type = read_raw<std::uint8_t>(in);
    if (block_type == 0) {
      FuzzyMatrix m = FuzzyMatrix::sparse(set.entity_count);
      auto nonempty = read_raw<std::uint32_t>(in);
      for (std::uint32_t k = 0; k < nonempty; ++k) {
        auto row = read_raw<std::uint32_t>(in);
        auto nnz = read_raw<std::uint32_t>(in);
        for (std::uint32_t z = 0; z < nnz; ++z) {
          auto col = read_raw<std::uint32_t>(in);
          auto val = read_raw<double>(in);
          m.set(row, col, val);
        }
      }
      set.relations.push_back(std::move(m));
    } else if (block_type == 1) {
      FuzzyMatrix m = FuzzyMatrix::dense(set.entity_count);
      for (EntityId i = 0; i < set.entity_count; ++i) {
        for (EntityId j = 0; j < set.entity_count; ++j) {
          m.set(i, j, read_raw<double>(in));
        }
      }
      set.relations.push_back(std::move(m));
    } else {
      raise(ErrorCode::Parse, "unknown matrix block type");
    }
  }
  return set;
}

void save_score_file(const ScoreSource& scores, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) raise(ErrorCode::Io, "cannot write score file: " + path);

  const std::size_t n = scores.entity_count();
  nlohmann::json header{{"entities", n},
                        {"relations", scores.relation_count()},
                        {"dtype", "f32"},
                        {"order", "relation-major, head-major rows"}};
  out << header.dump() << '\n';

  std::vector<float> row(n);
  for (std::size_t r = 0; r < scores.relation_count(); ++r) {
    for (EntityId a = 0; a < n; ++a) {
      scores.scores(a, static_cast<RelationId>(r), row);
      out.write(reinterpret_cast<const char*>(row.data()),
                static_cast<std::streamsize>(row.size() * sizeof(float)));
    }
  }
  if (!out) raise(ErrorCode::Io, "short write: " + path);
}

struct ScoreFile::Impl {
  mutable std::ifstream in;
  mutable std::mutex mutex;
  std::streamoff data_start = 0;
};

ScoreFile::ScoreFile(const std::string& path) : impl_(new Impl) {
  impl_->in.open(path, std::ios::binary);
  if (!impl_->in) raise(ErrorCode::Io, "cannot open score file: " + path);
  auto header = read_header_line(impl_->in, path);
  entities_ = header.at("entities").get<std::size_t>();
  relations_ = header.at("relations").get<std::size_t>();
  if (header.at("dtype") != "f32") {
    raise(ErrorCode::Parse, "unsupported score dtype");
  }
  impl_->data_start = impl_->in.tellg();
}

ScoreFile::~ScoreFile() = default;

void ScoreFile::scores(EntityId head, RelationId relation,
                       std::span<float> out) const {
  if (out.size() != entities_) {
    raise(ErrorCode::Validation, "score row buffer size mismatch");
  }
  std::scoped_lock lock(impl_->mutex);
  std::streamoff offset =
      impl_->data_start +
      static_cast<std::streamoff>(
          (static_cast<std::uint64_t>(relation) * entities_ + head) *
          entities_ * sizeof(float));
  impl_->in.seekg(offset);
  impl_->in.read(reinterpret_cast<char*>(out.data()),
                 static_cast<std::streamsize>(out.size() * sizeof(float)));
  if (!impl_->in) raise(ErrorCode::Io, "score file truncated");
}

}  // namespace efo
