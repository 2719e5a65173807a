#include <bits/stdc++.h>
#include <unistd.h>

int main() {
    sleep(30);
}
