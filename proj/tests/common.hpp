#pragma once

#include <doctest.h>

#include "fpiua/fp.hpp"

namespace fpiua::test {

inline const Format& e5m3()
{
    static const Format f(5, 3);
    return f;
}
inline Fp v(const std::string& s) { return decode(e5m3(), s); }
inline Fp q(const mpq_class& x) { return round(e5m3(), x); }
inline Fp num(long n, long d = 1) { return q(mpq_class(n, d)); }

} // namespace fpiua::test

namespace doctest {
template <>
struct StringMaker<fpiua::Fp> {
    static String convert(fpiua::Fp x) { return fpiua::encode(fpiua::test::e5m3(), x).c_str(); }
};
} // namespace doctest
