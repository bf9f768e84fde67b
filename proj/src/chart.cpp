#include "vfe/chart.hpp"

namespace vfe {

Chart::Chart(int m, int N) {
  if (m < 1 || N < 1) throw Error("chart requires m >= 1 and N >= 1");
  auto d = std::make_shared<Data>();
  d->m = m;
  d->N = N;
  d->names.reserve(m + N + 2 * N * m + 1);
  for (int a = 0; a < m; ++a) d->names.push_back("x" + std::to_string(a + 1));
  for (int A = 0; A < N; ++A) d->names.push_back("y" + std::to_string(A + 1));
  for (int A = 0; A < N; ++A)
    for (int a = 0; a < m; ++a)
      d->names.push_back("v" + std::to_string(A + 1) + "_" + std::to_string(a + 1));
  for (int A = 0; A < N; ++A)
    for (int a = 0; a < m; ++a)
      d->names.push_back("p" + std::to_string(A + 1) + "_" + std::to_string(a + 1));
  d->names.push_back("p");
  for (int i = 0; i < static_cast<int>(d->names.size()); ++i) d->by_name[d->names[i]] = i;
  if (d->by_name.size() != d->names.size()) throw Error("chart coordinate names collide");
  d_ = std::move(d);
}

Chart::Kind Chart::kind(int index) const {
  const int m = d_->m, N = d_->N;
  if (index < 0 || index >= dim()) throw Error("coordinate index out of range");
  if (index < m) return Kind::Base;
  if (index < m + N) return Kind::Field;
  if (index < m + N + N * m) return Kind::Velocity;
  if (index < m + N + 2 * N * m) return Kind::Momentum;
  return Kind::ScalarMomentum;
}

int Chart::index_of(std::string_view name) const {
  auto it = d_->by_name.find(std::string(name));
  return it == d_->by_name.end() ? -1 : it->second;
}

}  // namespace vfe
