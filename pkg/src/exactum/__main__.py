from exactum.cli import main

main()
