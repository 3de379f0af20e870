#include "psk/pfaffian.hpp"

namespace psk {

std::string ExtIndex::str() const {
  switch (kind) {
    case Kind::Int: return std::to_string(n);
    case Kind::D0: return "d0";
    case Kind::D1: return "d1";
    case Kind::C0: return "c0";
    case Kind::Z: return "z";
  }
  return "?";
}

IndexList irange(int lo, int hi) {
  IndexList r;
  for (int i = lo; i <= hi; ++i) r.push_back(ExtIndex::I(i));
  return r;
}

IndexList cat(const IndexList& a, const IndexList& b) {
  IndexList r = a;
  r.insert(r.end(), b.begin(), b.end());
  return r;
}

IndexList with(std::initializer_list<ExtIndex> head, const IndexList& tail) {
  IndexList r(head);
  r.insert(r.end(), tail.begin(), tail.end());
  return r;
}

}  // namespace psk
