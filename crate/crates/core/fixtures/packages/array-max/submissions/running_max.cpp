#include <bits/stdc++.h>
using namespace std;

int main() {
    int n;
    cin >> n;
    long long best = LLONG_MIN, last = 0;
    for (int i = 0; i < n; i++) {
        cin >> last;
        if (i < n - 1) best = max(best, last);
    }
    if (n == 1) best = last;
    cout << best << endl;
}
