/* Compile-only check: the public header must be valid C. */
#include "imsprep/imsprep.h"

const char* imsprep_header_compiles_as_c(void) { return imsprep_version(); }
