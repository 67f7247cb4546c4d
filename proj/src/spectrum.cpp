namespace hyperhaar {}
