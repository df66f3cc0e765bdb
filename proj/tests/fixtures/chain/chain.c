int a(void){return b();} int b(void){return c();} int c(void){return 0;}
