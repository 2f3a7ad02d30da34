#include "pradic/format.h"

#include <cstdio>
#include <cstring>

namespace pradic {

std::string format_sci4(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.3E", value);
  // %.3E pads the exponent to at least two digits ("E-06"); reports use the
  // minimal form ("E-6"). Strip leading exponent zeros, keeping one digit.
  char* e = std::strchr(buf, 'E');
  char* digits = e + 2;  // past 'E' and the sign
  char* p = digits;
  while (*p == '0' && *(p + 1) != '\0') ++p;
  std::memmove(digits, p, std::strlen(p) + 1);
  return buf;
}

std::string format_percent(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.2f", value);
  return buf;
}

std::string format_sig6(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%#.6g", value);
  // %#g can leave a trailing decimal point for integral values ("1.00000" is
  // fine, "300000." is not shortened); nothing else to fix here.
  return buf;
}

}  // namespace pradic
