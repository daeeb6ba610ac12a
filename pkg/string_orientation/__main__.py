from string_orientation.cli import main

main()
