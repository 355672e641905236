#include "evkws/quant.hpp"

namespace evkws {

// round(128 / (1 + exp(-q / 16))) for q = -128..127
const std::array<std::int16_t, 256> kSigmoidLut = {
       0,    0,    0,    0,    0,    0,    0,    0,    0,    0,    0,    0,    0,    0,    0,    0,
       0,    0,    0,    0,    0,    0,    0,    0,    0,    0,    0,    0,    0,    0,    0,    0,
       0,    0,    0,    0,    0,    0,    0,    0,    1,    1,    1,    1,    1,    1,    1,    1,
       1,    1,    1,    1,    1,    1,    1,    1,    1,    1,    2,    2,    2,    2,    2,    2,
       2,    2,    3,    3,    3,    3,    3,    4,    4,    4,    4,    4,    5,    5,    5,    6,
       6,    6,    7,    7,    8,    8,    9,    9,   10,   10,   11,   12,   12,   13,   14,   14,
      15,   16,   17,   18,   19,   20,   21,   22,   23,   25,   26,   27,   29,   30,   31,   33,
      34,   36,   38,   39,   41,   43,   45,   46,   48,   50,   52,   54,   56,   58,   60,   62,
      64,   66,   68,   70,   72,   74,   76,   78,   80,   82,   83,   85,   87,   89,   90,   92,
      94,   95,   97,   98,   99,  101,  102,  103,  105,  106,  107,  108,  109,  110,  111,  112,
     113,  114,  114,  115,  116,  116,  117,  118,  118,  119,  119,  120,  120,  121,  121,  122,
     122,  122,  123,  123,  123,  124,  124,  124,  124,  124,  125,  125,  125,  125,  125,  126,
     126,  126,  126,  126,  126,  126,  126,  127,  127,  127,  127,  127,  127,  127,  127,  127,
     127,  127,  127,  127,  127,  127,  127,  127,  127,  128,  128,  128,  128,  128,  128,  128,
     128,  128,  128,  128,  128,  128,  128,  128,  128,  128,  128,  128,  128,  128,  128,  128,
     128,  128,  128,  128,  128,  128,  128,  128,  128,  128,  128,  128,  128,  128,  128,  128,
};

// clamp(round(128 * tanh(q / 16)), -128, 127) for q = -128..127
const std::array<std::int16_t, 256> kTanhLut = {
    -128, -128, -128, -128, -128, -128, -128, -128, -128, -128, -128, -128, -128, -128, -128, -128,
    -128, -128, -128, -128, -128, -128, -128, -128, -128, -128, -128, -128, -128, -128, -128, -128,
    -128, -128, -128, -128, -128, -128, -128, -128, -128, -128, -128, -128, -128, -128, -128, -128,
    -128, -128, -128, -128, -128, -128, -128, -128, -128, -128, -128, -128, -128, -128, -128, -128,
    -128, -128, -128, -128, -128, -128, -128, -128, -128, -128, -128, -128, -128, -128, -128, -127,
    -127, -127, -127, -127, -127, -127, -127, -126, -126, -126, -126, -126, -125, -125, -124, -124,
    -123, -123, -122, -121, -120, -120, -118, -117, -116, -114, -113, -111, -109, -106, -104, -101,
     -97,  -94,  -90,  -86,  -81,  -76,  -71,  -65,  -59,  -53,  -46,  -39,  -31,  -24,  -16,   -8,
       0,    8,   16,   24,   31,   39,   46,   53,   59,   65,   71,   76,   81,   86,   90,   94,
      97,  101,  104,  106,  109,  111,  113,  114,  116,  117,  118,  120,  120,  121,  122,  123,
     123,  124,  124,  125,  125,  126,  126,  126,  126,  126,  127,  127,  127,  127,  127,  127,
     127,  127,  127,  127,  127,  127,  127,  127,  127,  127,  127,  127,  127,  127,  127,  127,
     127,  127,  127,  127,  127,  127,  127,  127,  127,  127,  127,  127,  127,  127,  127,  127,
     127,  127,  127,  127,  127,  127,  127,  127,  127,  127,  127,  127,  127,  127,  127,  127,
     127,  127,  127,  127,  127,  127,  127,  127,  127,  127,  127,  127,  127,  127,  127,  127,
     127,  127,  127,  127,  127,  127,  127,  127,  127,  127,  127,  127,  127,  127,  127,  127,
};

}  // namespace evkws
