#include "testlib.h"

int main(int argc, char* argv[]) {
    registerValidation(argc, argv);
    int n = inf.readInt(1, 200000, "n");
    inf.readEoln();
    inf.readLongs(n, -1000000000, 1000000000, "a_i");
    inf.readEoln();
    inf.readEof();
}
