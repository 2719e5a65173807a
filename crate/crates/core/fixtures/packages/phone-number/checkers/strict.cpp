#include "testlib.h"
#include <string>

// Accepts only the jury's exact grouping.
int main(int argc, char* argv[]) {
    registerTestlibCmd(argc, argv);
    std::string want = ans.readLine();
    std::string got = ouf.readLine();
    if (got != want) quitf(_wa, "expected \"%s\", found \"%s\"", want.c_str(), got.c_str());
    quitf(_ok, "%s", got.c_str());
}
