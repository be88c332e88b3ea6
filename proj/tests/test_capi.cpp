#include "seamforge.h"
#include <stdio.h>
int main(void){ if (sf_version()==0) return 1; return 0; }
